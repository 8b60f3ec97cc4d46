"""Graph-based age estimation laboratory, Python surface.

The heavy lifting lives in the compiled ``_core`` module; this package just
re-exports it. Configs are the same ``key = value`` text the CLI consumes.
"""

try:
    from ._core import *  # noqa: F401,F403  (installed wheel layout)
    from . import _core as _impl
except ImportError:  # in-tree builds put _core on PYTHONPATH directly
    from _core import *  # noqa: F401,F403
    import _core as _impl

__all__ = [name for name in dir(_impl) if not name.startswith("_")]
del _impl
