from ._config import SolverConfig, FactorTriple, SolverState, TraceRecord
from ._config import Outcome, SolverResult
from ._adm import initialize, solve_rows, reorthonormalize_and_truncate
from ._adm import step, run, relative_residual
from ._adm import localized_directions, excess_directions
from ._solution import ADMSolution


__all__ = ('SolverConfig',
           'FactorTriple',
           'SolverState',
           'TraceRecord',
           'Outcome',
           'SolverResult',
           'initialize',
           'solve_rows',
           'reorthonormalize_and_truncate',
           'step',
           'run',
           'relative_residual',
           'localized_directions',
           'excess_directions',
           'ADMSolution')
