"""Exact solver and experiment toolkit for semi-restricted games on digraphs.

Rei must use each vertex ``v`` of a digraph exactly ``r[v]`` times while
Norman plays unrestricted; Norman scores +1 when his vertex has an arc to
Rei's.  The modules here compute exact optimal values, check structural
properties of those values, and simulate strategies.
"""

from semigame.errors import InputError, InternalError, SemigameError
from semigame.graph import Digraph

__all__ = ["Digraph", "InputError", "InternalError", "SemigameError"]
__version__ = "0.1.0"
