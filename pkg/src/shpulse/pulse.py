"""Stationary symmetric pulses as truncated Fourier series.

A pulse on [-L_f, L_f] is represented by real coefficients a_k of

    phi(x) = sum_{|k| <= N} a_k exp(i*pi*k*x/L_f),   a_{-k} = a_k,

so only the half vector a_0..a_N is stored.  The stationarity condition
0 = -(1 + d_xx)^2 u - mu*u + nu*u^2 - u^3 becomes, componentwise,

    F_k(a) = [-mu - (1 - k^2 pi^2/L_f^2)^2] a_k + nu (a*a)_k - (a*a*a)_k,

with * the truncated convolution over |k_i| <= N.  Newton's method is run
on the half vector, which removes the translational zero direction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import toeplitz

from .model import Params, nonlinearity, nonlinearity_deriv, normal_form

__all__ = [
    "FourierPulse",
    "PulseFileError",
    "NewtonError",
    "convolve2",
    "convolve3",
    "residual",
    "jacobian",
    "newton_solve",
    "seed_from_normal_form",
    "evaluate",
    "potential",
    "save",
    "load",
]


class PulseFileError(ValueError):
    """Raised when a pulse file cannot be parsed or violates an invariant."""


class NewtonError(RuntimeError):
    """Raised when the Newton iteration fails to converge or degenerates."""

    def __init__(self, message: str, residual_norm: float):
        super().__init__(f"{message} (last residual sup-norm {residual_norm:.3e})")
        self.residual_norm = residual_norm


@dataclass(frozen=True, eq=False)
class FourierPulse:
    """Truncated, even Fourier representation of a stationary profile.

    Attributes
    ----------
    params : Params
        Model parameters (nu, mu).
    phi : float
        Phase tag of the underlying profile family (0 or pi).
    L_f : float
        Half-period; the profile lives on [-L_f, L_f].
    N : int
        Truncation order.
    a : ndarray, shape (N+1,)
        Half coefficient vector a_0..a_N; the full vector is the even
        extension a_{-k} = a_k.
    residual_norm : float
        Sup-norm of F at these coefficients.
    """

    params: Params
    phi: float
    L_f: float
    N: int
    a: np.ndarray
    residual_norm: float

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        if a.shape != (self.N + 1,):
            raise ValueError(
                f"expected {self.N + 1} coefficients a_0..a_N, got shape {a.shape}"
            )
        object.__setattr__(self, "a", a)
        if self.L_f <= 0:
            raise ValueError("L_f must be positive")

    def full(self) -> np.ndarray:
        """Full coefficient vector a_{-N}..a_N via the even extension."""
        return np.concatenate([self.a[:0:-1], self.a])


def convolve2(a: np.ndarray) -> np.ndarray:
    """(a*a)_k = sum_{k1+k2=k} a_{k1} a_{k2} for |k|, |k_i| <= N.

    `a` is a full coefficient vector of odd length 2N+1.
    """
    a = np.asarray(a, dtype=float)
    n = (a.size - 1) // 2
    return np.convolve(a, a)[n : 3 * n + 1]


def convolve3(a: np.ndarray) -> np.ndarray:
    """(a*a*a)_k, the triple sum over k1+k2+k3 = k with all |k_i| <= N.

    The intermediate product is kept at full length: truncating it would
    drop pairs whose partial sum leaves [-N, N] even though the triple
    sum returns to range.
    """
    a = np.asarray(a, dtype=float)
    n = (a.size - 1) // 2
    return np.convolve(np.convolve(a, a), a)[2 * n : 4 * n + 1]


def _linear_symbol(N: int, p: Params, L_f: float) -> np.ndarray:
    k = np.arange(-N, N + 1)
    return -p.mu - (1.0 - (k * np.pi / L_f) ** 2) ** 2


def residual(a: np.ndarray, p: Params, L_f: float) -> np.ndarray:
    """Stationarity residual F(a) on the full coefficient vector."""
    a = np.asarray(a, dtype=float)
    N = (a.size - 1) // 2
    return _linear_symbol(N, p, L_f) * a + p.nu * convolve2(a) - convolve3(a)


def jacobian(a: np.ndarray, p: Params, L_f: float) -> np.ndarray:
    """Dense DF(a) on the full vector, assembled analytically.

    dF_k/da_j = lin_k delta_{kj} + 2 nu a_{k-j} - 3 (a*a)_{k-j}, where the
    quadratic convolution in the cubic term is the untruncated one (length
    4N+1), matching the differentiated triple sum.
    """
    a = np.asarray(a, dtype=float)
    N = (a.size - 1) // 2
    a_ext = np.concatenate([np.zeros(N), a, np.zeros(N)])  # indices -2N..2N
    w = 2.0 * p.nu * a_ext - 3.0 * np.convolve(a, a)
    T = toeplitz(w[2 * N :], w[2 * N :: -1])
    return np.diag(_linear_symbol(N, p, L_f)) + T


def _half_to_full(h: np.ndarray) -> np.ndarray:
    return np.concatenate([h[:0:-1], h])


def newton_solve(
    seed: FourierPulse,
    tol: float = 1e-12,
    max_iter: int = 50,
    history: list | None = None,
) -> FourierPulse:
    """Refine a seed pulse by Newton's method on the half vector.

    The reduced system substitutes a_{-k} = a_k into F_k for k = 0..N, so
    the iteration acts on N+1 unknowns and never sees the translational
    zero mode of the full system.  Convergence is declared on the sup-norm
    of the full residual.

    Parameters
    ----------
    history : list, optional
        If given, the residual sup-norm of every iterate (including the
        seed) is appended to it.

    Raises
    ------
    NewtonError
        On a singular Newton system, or if `max_iter` steps do not bring
        the residual below `tol`.
    """
    N = seed.N
    h = seed.a.copy()
    res_norm = np.inf
    for _ in range(max_iter + 1):
        full = _half_to_full(h)
        F = residual(full, seed.params, seed.L_f)
        res_norm = float(np.abs(F).max())
        if history is not None:
            history.append(res_norm)
        if res_norm <= tol:
            return replace(seed, a=h, residual_norm=res_norm)
        J = jacobian(full, seed.params, seed.L_f)
        # columns of the reduced Jacobian: j and -j act together for j >= 1
        Jh = J[N:, N:].copy()
        Jh[:, 1:] += J[N:, N - 1 :: -1]
        try:
            step = np.linalg.solve(Jh, -F[N:])
        except np.linalg.LinAlgError as exc:
            raise NewtonError(f"singular Newton system: {exc}", res_norm) from exc
        h = h + step
    raise NewtonError(f"no convergence in {max_iter} iterations", res_norm)


def seed_from_normal_form(
    p: Params, phi: float, L_f: float = 100.0, N: int = 128, scale: float = 1.0
) -> FourierPulse:
    """Project the small-amplitude profile scale*u_phi onto the Fourier basis.

    Coefficients come from composite-trapezoid quadrature on a uniform grid
    of 4N+1 points; for the smooth, even integrand this is spectrally
    accurate, and a_k = (1/2L_f) integral u(x) cos(pi k x / L_f) dx.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    x = np.linspace(-L_f, L_f, 4 * N + 1)
    u = scale * normal_form(x, phi, p)
    k = np.arange(N + 1)
    basis = np.cos(np.pi * np.outer(k, x) / L_f)
    a = np.trapezoid(basis * u, x, axis=1) / (2.0 * L_f)
    res = residual(_half_to_full(a), p, L_f)
    return FourierPulse(
        params=p,
        phi=float(phi),
        L_f=float(L_f),
        N=int(N),
        a=a,
        residual_norm=float(np.abs(res).max()),
    )


def evaluate(pulse: FourierPulse, x, derivative: int = 0):
    """Evaluate the profile (or a series derivative) at x in [-L_f, L_f].

    phi(x) = a_0 + 2 sum_{k>=1} a_k cos(pi k x / L_f); derivatives are
    taken term by term.
    """
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > pulse.L_f):
        raise ValueError(f"x outside the pulse domain [-{pulse.L_f}, {pulse.L_f}]")
    k = np.arange(1, pulse.N + 1)
    rate = k * np.pi / pulse.L_f
    angle = np.multiply.outer(x, rate)
    d = derivative
    if d % 2 == 0:
        terms = (-1.0) ** (d // 2) * np.cos(angle)
        head = pulse.a[0] if d == 0 else 0.0
    else:
        terms = (-1.0) ** ((d + 1) // 2) * np.sin(angle)
        head = 0.0
    out = head + 2.0 * (terms * rate**d) @ pulse.a[1:]
    return float(out) if out.ndim == 0 else out


def potential(pulse: FourierPulse, x):
    """f'(phi(x)) — the x-dependent potential of the linearized equation."""
    return nonlinearity_deriv(evaluate(pulse, x), pulse.params)


_FIELDS = ("nu", "mu", "phi", "L_f", "N", "coefficients", "residual_norm")


def save(pulse: FourierPulse, path) -> None:
    """Write a pulse to a self-describing JSON document."""
    doc = {
        "nu": pulse.params.nu,
        "mu": pulse.params.mu,
        "phi": pulse.phi,
        "L_f": pulse.L_f,
        "N": pulse.N,
        "coefficients": [float(c) for c in pulse.a],
        "residual_norm": pulse.residual_norm,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load(path) -> FourierPulse:
    """Read a pulse file written by `save`, validating all invariants."""
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PulseFileError(
            f"{path}: malformed pulse file: {exc.msg} "
            f"(line {exc.lineno}, column {exc.colno})"
        ) from exc
    if not isinstance(doc, dict):
        raise PulseFileError(f"{path}: expected a JSON object at top level")
    missing = [f for f in _FIELDS if f not in doc]
    if missing:
        raise PulseFileError(f"{path}: missing field(s): {', '.join(missing)}")
    try:
        params = Params(nu=float(doc["nu"]), mu=float(doc["mu"]))
    except ValueError as exc:
        raise PulseFileError(f"{path}: {exc}") from exc
    try:
        a = np.asarray(doc["coefficients"], dtype=float)
        pulse = FourierPulse(
            params=params,
            phi=float(doc["phi"]),
            L_f=float(doc["L_f"]),
            N=int(doc["N"]),
            a=a,
            residual_norm=float(doc["residual_norm"]),
        )
    except (TypeError, ValueError) as exc:
        raise PulseFileError(f"{path}: {exc}") from exc
    return pulse
