'''Instance and run directories.

An instance directory holds ``observed.mtx``, ``s_star.mtx``,
``u_star.txt``, ``sigma_star.txt``, ``v_star.txt`` and ``manifest.txt``;
a run directory ``x.txt``, ``sigma.txt``, ``y.txt``, ``s.mtx``,
``trace.csv`` and ``manifest.txt``. Floats are written with 17 significant
digits.
'''
import csv
import os
from dataclasses import dataclass, field, fields

import numpy as np

from .observation import ObservedMatrix
from .observation import read_matrix_market, write_matrix_market
from .outlier import SparseCorrection
from .solution import FactorTriple, TraceRecord
from .synthetic import DENSE_CAP, GroundTruth, InstanceSpec


MANIFEST = 'manifest.txt'
OBSERVED = 'observed.mtx'
S_STAR = 's_star.mtx'
U_STAR = 'u_star.txt'
SIGMA_STAR = 'sigma_star.txt'
V_STAR = 'v_star.txt'
X = 'x.txt'
SIGMA = 'sigma.txt'
Y = 'y.txt'
S = 's.mtx'
TRACE = 'trace.csv'
TRACE_HEADER = ('iter', 'tau', 'rank', 'dropped', 'wall_ms')
FLOAT_FORMAT = '%.17g'


def format_value(value):
    if value is None:
        return 'none'
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), '.17g')
    return str(value)


def parse_value(text):
    '''Inverse of ``format_value`` for the manifest value types.'''
    lowered = text.lower()
    if lowered == 'none':
        return None
    if lowered in ('true', 'false'):
        return lowered == 'true'
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def write_manifest(path, items):
    with open(path, 'w') as f:
        for key, value in items:
            f.write('{} = {}\n'.format(key, format_value(value)))


def read_manifest(path):
    manifest = {}
    with open(path, 'r') as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            key, sep, value = line.partition('=')
            if not sep:
                raise ValueError('{}:{}: expected "key = value", got '
                                 '{!r}'.format(path, lineno, line))
            manifest[key.strip()] = parse_value(value.strip())
    return manifest


def _write_dense(path, a):
    np.savetxt(path, np.atleast_1d(a), fmt=FLOAT_FORMAT)


def _read_dense(path, n_cols):
    # loadtxt squeezes single rows and single columns
    return np.ascontiguousarray(np.loadtxt(path).reshape(-1, n_cols))


def _correction_as_matrix(correction, shape):
    return ObservedMatrix.from_arrays(shape[0], shape[1],
                                      correction.rows,
                                      correction.cols,
                                      correction.values)


def entry_ids(obs, rows, cols):
    '''Entry-ids of ``(rows, cols)`` in ``obs``; all have to be observed.'''
    keys = obs.rows * obs.n + obs.cols
    wanted = np.asarray(rows, dtype=np.int64) * obs.n + \
        np.asarray(cols, dtype=np.int64)
    ids = np.searchsorted(keys, wanted)
    found = ids < len(keys)
    found[found] = keys[ids[found]] == wanted[found]
    if not np.all(found):
        idx = np.flatnonzero(~found)[0]
        raise ValueError('Entry ({}, {}) is not observed'.format(
            rows[idx], cols[idx]))
    return ids


def save_instance(path, obs, truth=None):
    '''Writes an instance directory; ``truth`` may be None.'''
    if not os.path.isdir(path):
        os.makedirs(path)
    write_matrix_market(obs, os.path.join(path, OBSERVED))
    items = [('d_rows', obs.m), ('d_cols', obs.n)]
    if truth is not None:
        _write_dense(os.path.join(path, U_STAR), truth.u_star)
        _write_dense(os.path.join(path, SIGMA_STAR), truth.sigma_star)
        _write_dense(os.path.join(path, V_STAR), truth.v_star)
        write_matrix_market(_correction_as_matrix(truth.s_star, obs.shape),
                            os.path.join(path, S_STAR))
        spec = truth.spec
        items += [('r', truth.rank),
                  ('p', float(truth.p)),
                  ('rho', float(truth.rho)),
                  ('seed', None if spec is None else spec.seed),
                  ('strict_sparsity',
                   False if spec is None else spec.strict_sparsity),
                  ('s_star_complete', truth.s_star_complete)]
    items.append(('n_entries', obs.n_entries))
    write_manifest(os.path.join(path, MANIFEST), items)


def has_ground_truth(path):
    return all(os.path.isfile(os.path.join(path, name))
               for name in (S_STAR, U_STAR, SIGMA_STAR, V_STAR))


def load_instance(path, dense_cap=DENSE_CAP):
    '''Reads an instance directory.

    Returns
    -------
    obs : ObservedMatrix

    truth : None or GroundTruth
        None if the ground truth files are missing.

    manifest : dict
    '''
    manifest = read_manifest(os.path.join(path, MANIFEST))
    obs = read_matrix_market(os.path.join(path, OBSERVED))
    if not has_ground_truth(path):
        return obs, None, manifest
    sigma_star = np.loadtxt(os.path.join(path, SIGMA_STAR), ndmin=1)
    u_star = _read_dense(os.path.join(path, U_STAR), len(sigma_star))
    v_star = _read_dense(os.path.join(path, V_STAR), len(sigma_star))
    s_matrix = read_matrix_market(os.path.join(path, S_STAR))
    s_star = SparseCorrection(s_matrix.rows, s_matrix.cols, s_matrix.values)

    keys = obs.rows * obs.n + obs.cols
    s_keys = s_star.rows * obs.n + s_star.cols
    observed = np.isin(s_keys, keys)
    ids = np.searchsorted(keys, s_keys[observed])
    s_star_observed = SparseCorrection(s_star.rows[observed],
                                       s_star.cols[observed],
                                       s_star.values[observed],
                                       entry_ids=ids)
    spec = None
    if 'seed' in manifest and 'r' in manifest:
        spec = InstanceSpec(d_rows=obs.m,
                            d_cols=obs.n,
                            r=manifest['r'],
                            p=manifest['p'],
                            rho=manifest['rho'],
                            seed=manifest['seed'],
                            strict_sparsity=manifest.get('strict_sparsity',
                                                         False))
    l_star = None
    if obs.m * obs.n <= dense_cap:
        l_star = np.dot(u_star * sigma_star, v_star.T)
    truth = GroundTruth(u_star=u_star,
                        sigma_star=sigma_star,
                        v_star=v_star,
                        s_star=s_star,
                        s_star_observed=s_star_observed,
                        omega=(obs.rows, obs.cols),
                        p=manifest.get('p', obs.n_entries / obs.m / obs.n),
                        rho=manifest.get('rho', 0.),
                        s_star_complete=manifest.get('s_star_complete',
                                                     True),
                        l_star=l_star,
                        spec=spec)
    return obs, truth, manifest


def write_trace(path, trace):
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(TRACE_HEADER)
        for record in trace:
            writer.writerow([record.iter,
                             format_value(float(record.tau)),
                             record.rank,
                             record.dropped,
                             format_value(float(record.wall_ms))])


def read_trace(path):
    with open(path, 'r', newline='') as f:
        reader = csv.reader(f)
        header = tuple(next(reader, ()))
        if header != TRACE_HEADER:
            raise ValueError('{}: unexpected trace header {}'.format(
                path, ','.join(header)))
        return [TraceRecord(iter=int(row[0]),
                            tau=float(row[1]),
                            rank=int(row[2]),
                            dropped=int(row[3]),
                            wall_ms=float(row[4]))
                for row in reader if row]


@dataclass
class RunManifest:
    instance: str
    outcome: str
    tau: float
    rank: int
    iterations: int
    relative_residual: float
    wall_ms: float
    n_drop_events: int
    trace: str = TRACE
    config: dict = field(default_factory=dict)

    def items(self):
        items = [(f.name, getattr(self, f.name)) for f in fields(self)
                 if f.name != 'config']
        items += [('config.{}'.format(key), value)
                  for key, value in self.config.items()]
        return items

    @classmethod
    def from_dict(cls, manifest):
        config = {key[len('config.'):]: value
                  for key, value in manifest.items()
                  if key.startswith('config.')}
        kwargs = {f.name: manifest[f.name] for f in fields(cls)
                  if f.name != 'config' and f.name in manifest}
        return cls(config=config, **kwargs)


def save_run(path, result, run_manifest, timing=True):
    '''Writes factors, outlier estimate, trace and manifest of a run.

    With ``timing=False`` all wall times are written as 0 so that repeated
    runs give identical files.
    '''
    if not os.path.isdir(path):
        os.makedirs(path)
    factors = result.factors
    _write_dense(os.path.join(path, X), factors.x)
    _write_dense(os.path.join(path, SIGMA), factors.sigma)
    _write_dense(os.path.join(path, Y), factors.y)
    shape = factors.shape
    write_matrix_market(_correction_as_matrix(result.correction, shape),
                        os.path.join(path, S))
    trace = result.state.trace
    if not timing:
        trace = [TraceRecord(r.iter, r.tau, r.rank, r.dropped, 0.)
                 for r in trace]
        run_manifest.wall_ms = 0.
    write_trace(os.path.join(path, run_manifest.trace), trace)
    write_manifest(os.path.join(path, MANIFEST), run_manifest.items())


def load_run(path):
    '''Reads a run directory.

    Returns
    -------
    factors : FactorTriple

    correction : SparseCorrection
        Without entry-ids.

    trace : list of TraceRecord

    manifest : RunManifest
    '''
    manifest = RunManifest.from_dict(
        read_manifest(os.path.join(path, MANIFEST)))
    sigma = np.loadtxt(os.path.join(path, SIGMA), ndmin=1)
    x = _read_dense(os.path.join(path, X), len(sigma))
    y = _read_dense(os.path.join(path, Y), len(sigma))
    s_matrix = read_matrix_market(os.path.join(path, S))
    correction = SparseCorrection(s_matrix.rows, s_matrix.cols,
                                  s_matrix.values)
    trace = read_trace(os.path.join(path, manifest.trace))
    return FactorTriple(x, sigma, y), correction, trace, manifest
