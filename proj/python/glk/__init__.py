"""Graph topology learning from nodal observations."""

from ._core import *  # noqa: F401,F403
from ._core import GlkError, SolverConfig

__all__ = [name for name in dir() if not name.startswith("_")]
