"""Swift-Hohenberg pulse stability toolkit.

Computes symmetric stationary pulses of u_t = -(1 + d_xx)^2 u + f(u) as
truncated Fourier series, counts their unstable eigenvalues two independent
ways (dense spectrum of the residual Jacobian vs. conjugate points of the
unstable Lagrangian frame), and provides the generic higher-order crossing
form / Maslov index machinery those counts rest on.
"""

from .model import Params

__all__ = ["Params"]
__version__ = "0.1.0"
