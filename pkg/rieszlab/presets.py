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

import json

kind_aliases = {
    'cascade': 'cascade-study',
    'nazarov': 'nazarov-pair',
    'headline': 'instability-headline',
    'pushforward': 'pushforward-study',
    'convergence': 'convergence-study',
}


def dump_to_preset(config):
    data = {k: v for k, v in config._asdict().items() if v is not None}
    data['params'] = {k: v for k, v in config.params.items()
                      if not k.startswith('_')}
    return json.dumps(data, indent=2, sort_keys=False)


def load_preset(data):
    preset = json.loads(data)
    if isinstance(preset, dict) and 'kind' in preset:
        preset['kind'] = kind_aliases.get(preset['kind'], preset['kind'])
    return preset
