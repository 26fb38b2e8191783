#
# RieszLab
#
# Copyright 2024 Seoul National University
#
# Permission is hereby granted, free of charge, to any person obtaining
# a copy of this software and associated documentation files (the
# “Software”), to deal in the Software without restriction, including
# without limitation the rights to use, copy, modify, merge, publish,
# distribute, sublicense, and/or sell copies of the Software, and to
# permit persons to whom the Software is furnished to do so, subject to
# the following conditions:
#
# The above copyright notice and this permission notice shall be included
# in all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED “AS IS”, WITHOUT WARRANTY OF ANY KIND,
# EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF
# MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN
# NO EVENT SHALL THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM,
# DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR
# OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR
# THE USE OR OTHER DEALINGS IN THE SOFTWARE.
#

import jinja2
import os
import math


class TemplateFiltersMixin:

    @staticmethod
    def filter_format_bool(value, truevalue, falsevalue):
        return [falsevalue, truevalue][int(value)]

    @staticmethod
    def filter_format_number(value):
        if isinstance(value, bool):
            return str(value)
        if isinstance(value, float):
            if math.isnan(value) or math.isinf(value):
                return str(value)
            return '{:.10g}'.format(value).replace('-', '−')
        return str(value).replace('-', '−')

    @staticmethod
    def filter_pluralize(value, singular, plural):
        return [singular, plural][int(value != 1)]

    @classmethod
    def set_filters(kls, env):
        for name in dir(kls):
            if name.startswith('filter_'):
                env.filters[name[7:]] = getattr(kls, name)


class ReportGenerator(TemplateFiltersMixin):

    table_preview_rows = 40

    def __init__(self, result, config, execopts, experiment_cls, version):
        self.result = result
        self.config = config
        self.execopts = execopts
        self.experiment_cls = experiment_cls
        self.version = version

        self.templates = self.load_templates()

    def generate(self):
        params = self.prepare_data()

        for name, template in self.templates.items():
            if name.endswith('.html'):
                output = template.render(**params)
                with open(os.path.join(self.execopts.output, name), 'w') as f:
                    f.write(output)

    def prepare_data(self):
        sections = {}
        for entry in self.result.entries:
            sections.setdefault(entry.section, []).append(entry)

        tables = {
            name: {
                'columns': list(table.columns),
                'rows': table.head(self.table_preview_rows).values.tolist(),
                'total': len(table),
            }
            for name, table in self.result.tables.items()
        }

        return {
            'version': self.version,
            'config': self.config,
            'experiment': self.experiment_cls,
            'sections': sections,
            'checks': self.result.checks,
            'failed': self.result.failed_checks(),
            'tables': tables,
        }

    def load_templates(self):
        template_loader = jinja2.PackageLoader('rieszlab', 'report_template')
        env = jinja2.Environment(loader=template_loader,
                                 autoescape=jinja2.select_autoescape(['html']))
        self.set_filters(env)

        return {
            name: env.get_template(name)
            for name in env.list_templates()
        }
