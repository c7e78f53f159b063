import os

import numpy as np
import pytest

from robustmc.cli import main, evaluate, EXIT_ERROR, EXIT_MAX_ITERS
from robustmc.observation import ObservedMatrix
from robustmc.solution import FactorTriple
from robustmc.storage import load_instance, read_manifest, save_instance
from robustmc.outlier import SparseCorrection
from robustmc.synthetic import InstanceSpec, generate


def read_files(path):
    contents = {}
    for name in sorted(os.listdir(path)):
        with open(os.path.join(path, name), 'rb') as f:
            contents[name] = f.read()
    return contents


def synth(path, *extra):
    argv = ['synth', '--rows', '40', '--rank', '1', '--p', '0.6',
            '--rho', '0.02', '--seed', '1', '--out', path]
    return main(argv + list(extra))


def test_synth_is_reproducible(tmpdir):
    first = str(tmpdir.join('first'))
    second = str(tmpdir.join('second'))
    assert synth(first) == 0
    assert synth(second) == 0
    assert read_files(first) == read_files(second)
    manifest = read_manifest(os.path.join(first, 'manifest.txt'))
    assert manifest['d_rows'] == manifest['d_cols'] == 40
    assert manifest['seed'] == 1

    obs, truth, _ = load_instance(first)
    expected, _ = generate(InstanceSpec(40, 40, 1, p=0.6, rho=0.02, seed=1))
    assert obs == expected
    assert truth.rank == 1


def test_usage_errors(tmpdir):
    out = str(tmpdir.join('bad'))
    with pytest.raises(SystemExit) as excinfo:
        main(['synth', '--rows', '10', '--rank', '0', '--p', '0.5',
              '--out', out])
    assert excinfo.value.code == EXIT_ERROR
    assert not os.path.exists(out)

    with pytest.raises(SystemExit) as excinfo:
        main(['solve', '--instance', out, '--r0', '1', '--tol', '0',
              '--out', out])
    assert excinfo.value.code == EXIT_ERROR

    with pytest.raises(SystemExit) as excinfo:
        main(['solve', '--instance', out, '--out', out])
    assert excinfo.value.code == EXIT_ERROR

    # missing instance directory
    assert main(['solve', '--instance', out, '--r0', '1',
                 '--out', str(tmpdir.join('run'))]) == EXIT_ERROR


def test_solve_is_reproducible_without_timing(tmpdir):
    instance = str(tmpdir.join('instance'))
    synth(instance)
    codes = []
    for name in ('run1', 'run2'):
        codes.append(main(['solve', '--instance', instance, '--r0', '1',
                           '--max-iters', '40', '--no-timing',
                           '--out', str(tmpdir.join(name))]))
    assert codes[0] == codes[1]
    assert codes[0] in (0, EXIT_MAX_ITERS)
    first = read_files(str(tmpdir.join('run1')))
    assert sorted(first) == ['manifest.txt', 's.mtx', 'sigma.txt',
                             'trace.csv', 'x.txt', 'y.txt']
    assert first == read_files(str(tmpdir.join('run2')))
    manifest = read_manifest(str(tmpdir.join('run1', 'manifest.txt')))
    assert manifest['wall_ms'] == 0
    n_entries = read_manifest(os.path.join(instance, 'manifest.txt'))[
        'n_entries']
    assert manifest['config.s'] == int(round(1.2 * 0.02 * n_entries))
    assert manifest['instance'] == os.path.abspath(instance)


def test_solve_help_explains_reproducible_traces(capsys):
    with pytest.raises(SystemExit):
        main(['solve', '--help'])
    flat = ''.join(capsys.readouterr().out.split())
    assert 'byte-identicalacrossrunswith--no-timing' in flat
    assert 'repeatedrunswithidenticalflagsbyte-identical' in flat

def test_solve_reports_the_iteration_limit(tmpdir):
    instance = str(tmpdir.join('instance'))
    synth(instance)
    code = main(['solve', '--instance', instance, '--r0', '1',
                 '--max-iters', '1', '--out', str(tmpdir.join('run'))])
    assert code == EXIT_MAX_ITERS
    manifest = read_manifest(str(tmpdir.join('run', 'manifest.txt')))
    assert manifest['outcome'] == 'MaxIters'
    assert manifest['iterations'] == 1


def test_eval_writes_a_report(tmpdir, capsys):
    instance = str(tmpdir.join('instance'))
    run_dir = str(tmpdir.join('run'))
    synth(instance)
    main(['solve', '--instance', instance, '--r0', '1', '--max-iters', '40',
          '--out', run_dir])
    capsys.readouterr()
    csv_path = str(tmpdir.join('report.csv'))
    assert main(['eval', '--run', run_dir, '--instance', instance,
                 '--csv', csv_path]) == 0

    printed = capsys.readouterr().out
    report = read_manifest(os.path.join(run_dir, 'eval.txt'))
    assert printed.strip().splitlines()[0].startswith('tau = ')
    for key in ('tau', 'relative_residual', 'rank', 'n_outliers',
                'rel_frobenius', 'max_norm', 'angle_x', 'angle_y',
                'rank_mismatch', 'stable_rank', 'theorem1.holds',
                'theorem1.eta'):
        assert key in report
    assert report['ground_truth'] is True
    assert report['rank_mismatch'] is False
    with open(csv_path) as f:
        header, values = f.read().splitlines()
    assert header.split(',')[0] == 'tau'
    assert len(header.split(',')) == len(values.split(','))


def test_evaluate_without_ground_truth():
    obs = ObservedMatrix.from_triplets(
        2, 2, [(0, 0, 1.), (0, 1, 2.), (1, 0, 2.), (1, 1, 5.)])
    factors = FactorTriple([[1.], [0.]], [1.], [[1.], [0.]])
    correction = SparseCorrection([1], [1], [5.])
    with pytest.warns(UserWarning):
        items = dict(evaluate(obs, None, factors, correction))
    assert items['ground_truth'] is False
    assert items['n_outliers'] == 1
    assert items['rank'] == 1
    assert items['tau'] == pytest.approx(8. ** 0.5)
    assert 'rel_frobenius' not in items


def test_evaluate_flags_rank_mismatch(tmpdir):
    path = str(tmpdir.join('instance'))
    obs, truth = generate(InstanceSpec(12, 10, 1, p=1., seed=3))
    save_instance(path, obs, truth)
    obs, truth, _ = load_instance(path)
    random_state = np.random.RandomState(3)
    x = np.linalg.qr(np.hstack([truth.u_star,
                                random_state.normal(size=(12, 1))]))[0]
    y = np.linalg.qr(np.hstack([truth.v_star,
                                random_state.normal(size=(10, 1))]))[0]
    factors = FactorTriple(x, [truth.sigma_star[0], 0.5], y)
    items = dict(evaluate(obs, truth, factors, SparseCorrection.empty()))
    assert items['rank_mismatch'] is True
    assert items['ground_truth'] is True
