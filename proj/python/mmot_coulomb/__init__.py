"""Multimarginal optimal transport with Coulomb cost.

Exact and entropic transport solvers on discretized densities, plan
mollification with exact marginal restoration, bosonic and fermionic recovery
wavefunctions, and hbar sweeps of the Hohenberg-Kohn upper bound.
"""

try:
    from ._core import *  # noqa: F401,F403  (installed layout)
    from . import _core as _impl
except ImportError:  # in-tree build: the extension sits on sys.path
    from _core import *  # type: ignore # noqa: F401,F403
    import _core as _impl

__version__ = "0.1.0"
__all__ = [name for name in dir(_impl) if not name.startswith("_")]
