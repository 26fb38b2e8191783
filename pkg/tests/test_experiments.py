import pytest

from rieszlab.config import validate_config
from rieszlab.experiments import ExperimentResult

KINDS = ['cascade-study', 'nazarov-pair', 'transplant', 'instability-headline',
         'pushforward-study', 'convergence-study']


def run_experiment(experiments, session, kind, **params):
    data = {'schema_version': 1, 'kind': kind, 'seed': 2024, 'params': params}
    config = validate_config(data, experiments)
    experiment = experiments[kind](**config.params, _seed=config.seed)
    return experiment(session)


def test_discovery(experiments):
    assert sorted(experiments, key=lambda k: experiments[k].priority) == KINDS


def test_result_entries():
    res = ExperimentResult('sample')
    res.add('cascade', 'gamma', 0.25, 'quadrature')
    res.check('cascade.gamma positive', 0.25 > 0, 0.0, 0.25)
    assert res.entries[0].entry == 'cascade.gamma'
    assert res.failed_checks() == []
    with pytest.raises(ValueError):
        res.add('cascade', 'gamma', 0.25, 'estimate')


def test_reduced_cascade_study(experiments, session):
    res = run_experiment(experiments, session, 'cascade-study', depth=8,
                         stop_depth=10, trials=0, growth_depths=[2, 4])
    entries = {e.entry: e.value for e in res.entries}
    assert entries['cascade.gamma'] == pytest.approx(0.25 * (1 - 0.75 ** 8))
    assert 'hitting.estimate' not in entries
    assert list(res.tables['growth'].depth) == [2, 4]
    assert res.failed_checks() == []


def test_reduced_pushforward_study(experiments, session):
    res = run_experiment(experiments, session, 'pushforward-study', depth=6,
                         scan_depth=4, maps=10, cantor_depth=4)
    entries = {e.entry: e.value for e in res.entries}
    assert entries['homeo.affine_ratio'] == pytest.approx(0.5)
    assert entries['cantor.omega_fixed'] is True
    assert len(res.tables['random_maps']) == 10
    assert res.failed_checks() == []


def test_seeded_runs_repeat(experiments, session):
    first = run_experiment(experiments, session, 'pushforward-study', depth=6,
                           scan_depth=4, maps=3, cantor_depth=3)
    again = run_experiment(experiments, session, 'pushforward-study', depth=6,
                           scan_depth=4, maps=3, cantor_depth=3)
    assert first.entries == again.entries


@pytest.mark.slow
@pytest.mark.parametrize('kind', KINDS)
def test_default_runs_pass_their_checks(experiments, session, kind):
    res = run_experiment(experiments, session, kind)
    assert res.failed_checks() == []
