import logging
import pytest

from rieszlab.log import console, initialize_logging, log


@pytest.fixture
def restore_handlers():
    yield
    for handler in [h for h in log.handlers if isinstance(h, logging.FileHandler)]:
        log.removeHandler(handler)
        handler.close()
    console.setLevel(logging.INFO)


def test_log_file_follows_the_latest_run(tmp_path, restore_handlers):
    first, second = tmp_path / 'first.txt', tmp_path / 'second.txt'
    initialize_logging(first)
    initialize_logging(second, quiet=True)
    log.debug('stage 2 discrepancy settled')

    files = [h for h in log.handlers if isinstance(h, logging.FileHandler)]
    assert len(files) == 1
    assert 'stage 2 discrepancy settled' in second.read_text()
    assert first.read_text() == ''
    assert console.level == logging.WARNING


def test_verbose_console(tmp_path, restore_handlers):
    initialize_logging(tmp_path / 'log.txt', verbose=True)
    assert console.level == logging.DEBUG
