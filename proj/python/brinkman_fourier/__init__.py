"""Python surface of the Brinkman gas laboratory.

Thin re-export of the compiled module: constitutive thermodynamics, the
quasi-static Brinkman solve, full simulation runs, and the inequality
utilities used by the diagnostics.
"""

try:
    from ._bfl import *  # noqa: F401,F403  (installed wheel layout)
    from ._bfl import __version__  # noqa: F401
except ImportError:  # in-tree build: extension sits on sys.path directly
    from _bfl import *  # noqa: F401,F403
    from _bfl import __version__  # noqa: F401
