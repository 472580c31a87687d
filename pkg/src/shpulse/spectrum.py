"""Point spectrum of the linearization from the dense Fourier Jacobian.

Linearizing the stationarity map F about a converged coefficient vector
gives DF(a) on the full 2N+1 modes; its eigenvalues approximate the point
spectrum of the linearized operator L = -(1+d_xx)^2 - mu + f'(phi).  The
translational mode phi'(x) shows up as a near-zero eigenvalue with
coefficient vector proportional to k*a_k, and is excluded from the
unstable count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pulse import FourierPulse, jacobian

__all__ = ["SpectrumReport", "eigenvalues_dense", "count_unstable"]

DEFAULT_THRESHOLD = 1e-4


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    """Eigenvalue summary of DF(a) for one pulse.

    `unstable` holds the real parts counted as unstable (real part above
    `threshold`, translational near-zero mode excluded), sorted ascending.
    `zero_mode` is the eigenvalue closest to 0.
    """

    eigenvalues: np.ndarray
    unstable: list[float]
    zero_mode: complex
    threshold: float
    zero_mode_vector: np.ndarray = field(repr=False, default=None)

    @property
    def count(self) -> int:
        return len(self.unstable)


def eigenvalues_dense(M: np.ndarray) -> np.ndarray:
    """Full spectrum (with multiplicity) of a dense real square matrix."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if M.shape[0] == 0:
        raise ValueError("empty matrix has no spectrum")
    if not np.isfinite(M).all():
        raise ValueError("matrix entries must be finite")
    return np.linalg.eigvals(M)


def count_unstable(
    pulse: FourierPulse, threshold: float = DEFAULT_THRESHOLD
) -> SpectrumReport:
    """Count unstable eigenvalues of the full-mode Jacobian at a pulse.

    The Jacobian of a symmetric pulse is symmetric (diagonal plus a
    symmetric convolution stencil), so its spectrum is real; eigenvalues
    with real part above `threshold` are reported, except the one nearest
    zero (the discretized translation mode phi', whose coefficients are
    proportional to k*a_k).
    """
    a_full = pulse.full()
    J = jacobian(a_full, pulse.params, pulse.L_f)
    ev = eigenvalues_dense(J)
    # eigenvector of the eigenvalue nearest zero, for diagnostics
    i0 = int(np.argmin(np.abs(ev)))
    zero_mode = complex(ev[i0])
    w, V = np.linalg.eig(J)
    j0 = int(np.argmin(np.abs(w - ev[i0])))
    vec = np.real_if_close(V[:, j0])
    unstable = sorted(
        float(e.real) for k, e in enumerate(ev) if e.real > threshold and k != i0
    )
    return SpectrumReport(
        eigenvalues=ev,
        unstable=unstable,
        zero_mode=zero_mode,
        threshold=threshold,
        zero_mode_vector=np.asarray(vec, dtype=float),
    )
