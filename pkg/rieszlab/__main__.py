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

from . import config, __version__
from .experiments import discover_experiments
from .experiment_runner import ExperimentRunner, ExecutionOptions
from .reporting import ReportGenerator
from .golden import write_golden, check_golden
from .quadrature import QuadratureError
from .log import log, initialize_logging
import argparse
import shutil
import sys
import os

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_TOLERANCE = 3


def parse_options(experiments, argv=None):
    userdefaults = config.load_config()

    parser = argparse.ArgumentParser(
        prog='rieszlab',
        description='RieszLab: Experiments on Two-Weight Inequalities for '
                    'Riesz Transforms')

    grp = parser.add_argument_group('Input/Output Options')
    grp.add_argument('--config', required=True, metavar='FILE',
                     help='experiment configuration in JSON')
    grp.add_argument('-o', '--out', default='rieszlab-output', metavar='DIR',
                     help='output directory (default: rieszlab-output)')
    grp.add_argument('--overwrite', action='store_true',
                     help='overwrite output directory if it already exists')
    grp.add_argument('-q', '--quiet', default=False, action='store_true',
                     help='do not print progress')
    grp.add_argument('--verbose', default=False, action='store_true',
                     help='print debugging messages')
    grp.add_argument('--version', action='version', version=__version__)

    threads = userdefaults.get('threads', 4)
    grp = parser.add_argument_group('Execution Options')
    grp.add_argument('-t', '--threads', type=int, default=threads, metavar='N',
                     help=f'number of worker processes (default: {threads})')
    grp.add_argument('--golden', default=None, choices=['write', 'check'],
                     help='write the report entries as golden values, or check '
                          'them against stored ones')

    epilog = ['experiment kinds:']
    for cls in sorted(experiments.values(), key=lambda c: c.priority):
        epilog.append(f'  {cls.name:22s} {cls.description}')
    parser.epilog = '\n'.join(epilog)
    parser.formatter_class = argparse.RawDescriptionHelpFormatter

    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error('--threads must be at least 1.')
    return args


def initialize_outputdir(outputdir, overwrite=False):
    if os.path.exists(outputdir):
        if overwrite:
            if os.path.isdir(outputdir):
                shutil.rmtree(outputdir)
            else:
                os.unlink(outputdir)
        else:
            raise FileExistsError('Output directory already exists.')

    os.makedirs(outputdir)


def load_experiment_config(path, experiments):
    data = config.read_experiment_config(path)
    expconfig = config.validate_config(data, experiments)
    if expconfig.golden is not None and not os.path.isabs(expconfig.golden):
        golden = os.path.join(os.path.dirname(os.path.abspath(path)),
                              expconfig.golden)
        expconfig = expconfig._replace(golden=golden)
    return expconfig


def golden_path(expconfig, outputdir):
    if expconfig.golden is not None:
        return expconfig.golden
    return os.path.join(outputdir, 'golden.json')


def process_golden(mode, result, expconfig, outputdir):
    path = golden_path(expconfig, outputdir)
    if mode == 'write':
        write_golden(result.entries, path)
        log.info(f'==> Golden values written to {path}')
        return EXIT_OK

    if not os.path.exists(path):
        log.error(f'Golden file {path} does not exist; write it first with '
                  '--golden write.')
        return EXIT_CONFIG

    mismatches = check_golden(result.entries, path, expconfig.tolerances)
    for m in mismatches:
        log.error(f'Golden mismatch in {m.entry}: expected {m.expected!r}, '
                  f'got {m.got!r} (tolerance {m.tol:g})')
    if mismatches:
        return EXIT_TOLERANCE
    log.info(f'==> All golden values in {path} match.')
    return EXIT_OK


def run_rieszlab(argv=None):
    experiments = discover_experiments()
    args = parse_options(experiments, argv)

    try:
        expconfig = load_experiment_config(args.config, experiments)
    except config.ConfigError as exc:
        log.error(f'Configuration error: {exc}')
        return EXIT_CONFIG

    execution_options = ExecutionOptions(
        output=args.out,
        threads=args.threads,
        quiet=args.quiet,
        overwrite=args.overwrite,
        golden=args.golden,
    )

    try:
        initialize_outputdir(args.out, args.overwrite)
        initialize_logging(os.path.join(args.out, 'log.txt'), args.quiet,
                           args.verbose)

        experiment_cls = experiments[expconfig.kind]
        runner = ExperimentRunner(experiment_cls, expconfig, execution_options)
        ret = runner.run()
        if ret != EXIT_OK:
            return ret

        ReportGenerator(runner.result, expconfig, execution_options,
                        experiment_cls, __version__).generate()
    except KeyboardInterrupt:
        return EXIT_FAILURE
    except FileExistsError:
        log.error('Output directory already exists. Use --overwrite '
                  'option to overwrite it.')
        return EXIT_FAILURE
    except QuadratureError as exc:
        log.error(f'Tolerance not reached: {exc}')
        return EXIT_TOLERANCE
    except (ValueError, RuntimeError) as exc:
        log.error(f'Experiment failed: {exc}')
        return EXIT_FAILURE

    status = EXIT_OK
    if args.golden is not None:
        status = process_golden(args.golden, runner.result, expconfig, args.out)

    failed = runner.result.failed_checks()
    for check in failed:
        log.error(f'Check failed: {check.name}: expected {check.expected!r}, '
                  f'got {check.got!r}')
    if failed and status == EXIT_OK:
        status = EXIT_TOLERANCE

    if status == EXIT_OK:
        log.info('Finished successfully. You can view the results '
                 f'in {args.out.rstrip("/")}/report.html.')
    return status


if __name__ == '__main__':
    ret = run_rieszlab()
    sys.exit(ret)
