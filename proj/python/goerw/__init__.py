"""Python access to the goerw core: trees, environments, ruin potentials,
walk simulation and the percolation estimators."""

from ._goerw import *  # noqa: F401,F403
from ._goerw import Error, __doc__  # noqa: F401
