"""Auto-parallelizer for a small pure-by-default functional language.

Programs are parsed, each call is classified pure or effectful from its
type signature, the entry function's do-block becomes a dependency graph,
and a greedy coordinator runs that graph on local threads or TCP workers.
"""
from .errors import AparError
from .runtime import Compiled, compile_source, run_local

__version__ = "0.1.0"
