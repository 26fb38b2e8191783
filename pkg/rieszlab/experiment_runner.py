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

import sys
import os
import json
from collections import namedtuple
from concurrent import futures
import pandas as pd
from tqdm import tqdm
from tabulate import tabulate
from .presets import dump_to_preset
from .experiments import Entry
from .log import hbar, hbar_double, hbar_stars, log
from . import __version__

ExecutionOptions = namedtuple('ExecutionOptions', [
    'output', 'threads', 'quiet', 'overwrite', 'golden'])


class SessionError(RuntimeError):
    pass


def run_job(func, args):
    try:
        return func(*args)
    except KeyboardInterrupt:
        return None


class JobSession:
    """Fans a list of (function, args) jobs out to the pool.

    Results come back in submission order whatever the completion order.
    """

    def __init__(self, executor, tasks, quiet=False, desc='Running jobs'):
        self.executor = executor
        self.tasks = tasks
        self.quiet = quiet
        self.desc = desc
        self.results = [None] * len(tasks)
        self.errors = []
        self.pbar = None

    def __enter__(self):
        self.pbar = tqdm(total=len(self.tasks), disable=self.quiet,
                         file=sys.stderr, unit='task', desc=self.desc)
        return self

    def __exit__(self, exc_type, exc_value, traceback):
        if self.pbar is not None:
            self.pbar.close()

    def run(self):
        jobs = set()
        for i, (func, args) in enumerate(self.tasks):
            future = self.executor.submit(run_job, func, args)
            future._jobidx = i
            future._type = 'job'
            jobs.add(future)

        while jobs:
            done, jobs = futures.wait(jobs, timeout=0.1,
                                      return_when=futures.FIRST_COMPLETED)
            for future in done:
                self.collect(future)
            if self.errors:
                for future in jobs:
                    future.cancel()
                futures.wait(jobs)
                break

        return self.results

    def collect(self, future):
        try:
            ret = future.result()
        except futures.CancelledError:
            return
        except Exception as exc:
            return self.handle_exception(exc)

        if ret is None:
            self.errors.append('KeyboardInterrupt')
            return

        self.results[future._jobidx] = ret
        if self.pbar is not None:
            self.pbar.update()

    def handle_exception(self, exc):
        import traceback
        import io

        errormsg = io.StringIO()
        traceback.print_exception(type(exc), exc, exc.__traceback__,
                                  file=errormsg)

        msg = [
            hbar_stars,
            'Error occurred in a worker job:',
            errormsg.getvalue(),
            hbar_stars,
            '',
            'Termination in progress. Waiting for running tasks '
            'to finish before closing the program.']

        log.error('\n'.join(msg))
        self.errors.append(exc.args)


class ExperimentSession:
    """What an experiment sees of the runner: the pool and a job fan-out."""

    def __init__(self, executor, quiet=False):
        self.executor = executor
        self.quiet = quiet

    def run(self, tasks, desc='Running jobs'):
        if not tasks:
            return []
        with JobSession(self.executor, tasks, self.quiet, desc) as sess:
            results = sess.run()
            if sess.errors:
                raise SessionError(f'{desc}: {len(sess.errors)} job(s) failed.')
        return results


class ExperimentRunner:

    value_format = '.10g'

    def __init__(self, experiment_cls, config, exec_options):
        self.experiment_cls = experiment_cls
        self.config = config
        self.execopts = exec_options
        self.outputdir = exec_options.output
        self.result = None

        self.initialize()

    def initialize(self):
        self.experiment = self.experiment_cls(**self.config.params,
                                              _seed=self.config.seed)

    def show_configuration(self):
        log.info(f'RieszLab Weighted Singular Integral Experiments {__version__}')
        log.info(hbar_double)
        log.info(f' * Experiment: {self.config.kind} '
                 f'({self.experiment_cls.description})')
        if self.config.seed is not None:
            log.info(f' * Seed: {self.config.seed}')
        for name, value in self.config.params.items():
            log.info(f' * {name}: {value}')
        log.info(f' * Worker processes: {self.execopts.threads}')
        log.info('')

    def run(self):
        self.show_configuration()

        with futures.ProcessPoolExecutor(max_workers=self.execopts.threads) as executor:
            session = ExperimentSession(executor, self.execopts.quiet)
            try:
                self.result = self.experiment(session)
            except SessionError as exc:
                log.error(f'==> Stopping: {exc}')
                return 1

        if self.result is None:
            log.warning('==> Interrupted.')
            return 1

        log.info(hbar)
        self.print_entries()
        self.save_results()
        return 0

    def print_entries(self):
        tabdata = [[e.entry, e.value, e.kind] for e in self.result.entries]
        log.info(tabulate(tabdata, ['entry', 'value', 'kind'], tablefmt='simple',
                          floatfmt=self.value_format) + '\n')

        if self.result.checks:
            tabdata = [[c.name, 'pass' if c.passed else 'FAIL', c.expected, c.got]
                       for c in self.result.checks]
            log.info(tabulate(tabdata, ['check', 'status', 'expected', 'got'],
                              tablefmt='simple', floatfmt=self.value_format) + '\n')

    def save_results(self):
        entries = pd.DataFrame(self.result.entries, columns=Entry._fields)
        entries.to_csv(os.path.join(self.outputdir, 'report.csv'), index=False)

        for name, table in self.result.tables.items():
            table.to_csv(os.path.join(self.outputdir, f'{name}.csv'), index=False)

        report = {
            'kind': self.config.kind,
            'version': __version__,
            'seed': self.config.seed,
            'entries': [e._asdict() for e in self.result.entries],
            'checks': [c._asdict() for c in self.result.checks],
            'tables': sorted(self.result.tables),
        }
        with open(os.path.join(self.outputdir, 'report.json'), 'w') as f:
            json.dump(report, f, indent=2)
            f.write('\n')

        paramspath = os.path.join(self.outputdir, 'parameters.json')
        self.save_experiment_parameters(paramspath)

    def save_experiment_parameters(self, path):
        optdata = dump_to_preset(self.config)
        with open(path, 'w') as f:
            f.write(optdata + '\n')
