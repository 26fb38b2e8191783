import pytest


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False,
                     help='run desk-scale experiments marked slow')


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: desk-scale run, needs --runslow')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


class SerialSession:
    """Runs experiment jobs in-process, one after the other."""

    executor = None
    quiet = True

    def run(self, tasks, desc=None):
        return [func(*args) for func, args in tasks]


@pytest.fixture
def session():
    return SerialSession()


@pytest.fixture
def experiments():
    from rieszlab.experiments import discover_experiments
    return discover_experiments()


def pytest_pycollect_makeitem(collector, name, obj):
    # Library helpers imported into test modules (e.g. diagnostics.testing_scan)
    # match the test_* pattern; only collect functions defined in the module.
    module = getattr(obj, '__module__', None) or ''
    if callable(obj) and module.startswith('rieszlab'):
        return []
    return None
