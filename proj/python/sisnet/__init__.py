"""SIS spread over time-varying weighted networks.

Thin wrapper over the compiled core: exact 2^n-state chain, n-intertwined
mean-field model, stochastic ensembles and stability certificates.
"""

try:
    from ._sisnet import *  # noqa: F401,F403
except ImportError:  # in-tree builds leave the extension next to the package
    from _sisnet import *  # noqa: F401,F403

__version__ = "1.0.0"
