from ..observation import ObservedMatrix
from ._adm import initialize, step, run
from ._config import SolverConfig


class Solution(object):
    name = 'Solution'

    def __init__(self):
        self.status = -1

    def initialize(self):
        self.status = 0

    def fit(self):
        if self.status < 0:
            raise RuntimeError("{} has to be initialized. "
                               "Run '{}.initialize' first!".format(
                                   self.name, self.name))


class ADMSolution(Solution):
    """Alternating direction solver for robust matrix completion.

    Parameters
    ----------
    config : None or SolverConfig
        If None, ``SolverConfig(**kwargs)`` is used.

    **kwargs
        Fields of ``SolverConfig``.

    Examples
    --------
    >>> solution = ADMSolution(s=100, r0=10, seed=1337)
    >>> solution.initialize(obs)
    >>> result = solution.fit()
    >>> x, sigma, y = result.factors.x, result.factors.sigma, result.factors.y
    """
    name = 'ADMSolution'

    def __init__(self, config=None, **kwargs):
        super(ADMSolution, self).__init__()
        if config is None:
            config = SolverConfig(**kwargs)
        elif kwargs:
            raise ValueError("Pass either 'config' or keyword arguments, "
                             "not both!")
        elif not isinstance(config, SolverConfig):
            raise ValueError("'config' has to be of type SolverConfig!")
        self.config = config
        self.obs = None
        self.state = None
        self.result = None

    def initialize(self, obs, factors=None):
        if not isinstance(obs, ObservedMatrix):
            raise ValueError("'obs' has to be of type ObservedMatrix!")
        super(ADMSolution, self).initialize()
        self.obs = obs
        self.state = initialize(obs, self.config, factors=factors)
        self.result = None
        return self.state

    def step(self):
        super(ADMSolution, self).fit()
        self.state = step(self.state, self.obs, self.config)
        return self.state

    def fit(self):
        super(ADMSolution, self).fit()
        self.result = run(self.obs, self.config, state=self.state)
        self.state = self.result.state
        self.status = 1
        return self.result
