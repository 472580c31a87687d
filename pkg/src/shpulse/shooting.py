"""Transport of the unstable plane along a pulse.

The linearization around a stationary pulse is a first-order system
``q' = B(x) q`` on ``R^4`` whose coefficient matrix approaches a constant
hyperbolic matrix as ``|x|`` grows.  The plane of solutions decaying as
``x -> -infinity`` starts (up to the potential's tail) at the unstable plane
of that constant matrix; integrating a frame of it across the pulse and
watching where it meets the sandwich plane ``span{e2, e3}`` is the geometric
half of the stability computation, the counterpart of counting unstable
eigenvalues of the linearization directly.

The integrated frame grows like ``exp(Re gamma * x)`` and its columns slowly
lose orthogonality, so the frame is re-orthonormalized every few samples by
a QR factorization with positive diagonal.  That changes neither the spanned
plane nor the sign of the sandwich determinant (the renormalizing factor has
positive determinant), so crossing locations are unaffected — a fact the
tests pin down numerically.
"""

from __future__ import annotations

import csv
from bisect import bisect_left
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp

from .lagrangian import (
    Frame,
    LagrangianPath,
    _qr_positive,
    is_lagrangian,
    plucker,
)
from .model import Params, asymptotic_frames, coefficient_matrix
from .pulse import FourierPulse, potential


@dataclass(frozen=True)
class ShootingSettings:
    """Numerical policy for the frame transport."""

    window: tuple[float, float] = (-60.0, 60.0)
    dx: float = 0.05
    rtol: float = 1e-10
    atol: float = 1e-10
    renorm_every: int = 5
    method: str = "RK45"

    def __post_init__(self) -> None:
        a, b = (float(self.window[0]), float(self.window[1]))
        if not (np.isfinite(a) and np.isfinite(b) and a < b):
            raise ValueError(f"window must be a finite interval, got {self.window}")
        object.__setattr__(self, "window", (a, b))
        if self.dx <= 0:
            raise ValueError("dx must be positive")
        if self.renorm_every < 1:
            raise ValueError("renorm_every must be a positive integer")


def initial_frame(p: Params, lam: float = 0.0) -> np.ndarray:
    """Orthonormal frame of the unstable plane of the tail matrix.

    The QR sign convention keeps the orientation of the closed-form basis,
    whose first Plücker coordinate is positive.
    """
    q, _ = _qr_positive(asymptotic_frames(lam, p).unstable_frame)
    return q


def sandwich_determinant(frame) -> float:
    """Determinant of rows (1, 4) of a 4-by-2 frame.

    Vanishes exactly when the spanned plane meets ``span{e2, e3}``
    nontrivially, which makes its sign changes the crossing detector.
    """
    M = frame.M if isinstance(frame, Frame) else np.asarray(frame, dtype=float)
    if M.shape != (4, 2):
        raise ValueError(f"expected a 4-by-2 frame, got shape {M.shape}")
    return float(M[0, 0] * M[3, 1] - M[0, 1] * M[3, 0])


def tail_rotation_period(p: Params, lam: float = 0.0) -> float:
    """Period with which the transported plane rotates in the far field.

    Individual tail solutions spiral with angular rate ``Im gamma``; a plane
    returns to itself after a half turn, so the period is ``pi / Im gamma``.
    """
    return float(np.pi / asymptotic_frames(lam, p).gamma1.imag)


@dataclass(frozen=True, eq=False)
class PathSample:
    """Diagnostics of the transported plane at one grid point."""

    x: float
    frame: Frame
    deta: float
    plucker: np.ndarray = field(repr=False)
    omega_drift: float


@dataclass(frozen=True, eq=False)
class FrameTrajectory:
    """The transported unstable plane, sampled on a uniform grid.

    Sample frames are orthonormalized views of the integrated frame, so all
    recorded quantities are bounded; the spanned plane is the same as that
    of the raw integration.  ``frame_at`` re-integrates from the nearest
    sample, which keeps arbitrary-point evaluation cheap and as accurate as
    the stored samples.
    """

    pulse: FourierPulse
    lam: float
    settings: ShootingSettings
    samples: tuple[PathSample, ...]

    def frame_at(self, x: float) -> Frame:
        x = float(x)
        a, b = self.settings.window
        overhang = 10.0 * self.settings.dx
        if not (a - overhang <= x <= b + overhang):
            raise ValueError(
                f"x = {x:.6g} lies outside the integration window [{a:g}, {b:g}]"
            )
        xs = [s.x for s in self.samples]
        i = min(max(bisect_left(xs, x), 0), len(xs) - 1)
        if i > 0 and abs(xs[i - 1] - x) < abs(xs[i] - x):
            i -= 1
        anchor = self.samples[i]
        if abs(anchor.x - x) < 1e-13:
            return anchor.frame
        rhs = _frame_rhs(self.pulse, self.lam)
        sol = solve_ivp(rhs, (anchor.x, x), anchor.frame.M.ravel(),
                        method=self.settings.method,
                        rtol=self.settings.rtol, atol=self.settings.atol)
        if not sol.success:
            raise RuntimeError(f"re-integration to x = {x:.6g} failed: {sol.message}")
        return Frame(sol.y[:, -1].reshape(4, 2))

    def path(self) -> LagrangianPath:
        return LagrangianPath(
            frame_fn=self.frame_at,
            domain=self.settings.window,
            samples=tuple((s.x, s.frame) for s in self.samples),
        )

    @property
    def xs(self) -> np.ndarray:
        return np.array([s.x for s in self.samples])

    @property
    def deta(self) -> np.ndarray:
        return np.array([s.deta for s in self.samples])


def _frame_rhs(pulse: FourierPulse, lam: float):
    def rhs(x: float, y: np.ndarray) -> np.ndarray:
        B = coefficient_matrix(potential(pulse, x), lam).B
        return (B @ y.reshape(4, 2)).ravel()

    return rhs


def integrate_frame(pulse: FourierPulse, lam: float = 0.0,
                    settings: ShootingSettings = ShootingSettings()) -> FrameTrajectory:
    """Transport the asymptotic unstable plane across the window.

    The frame starts at the unstable plane of the constant tail matrix and
    is integrated segment by segment, re-orthonormalized every
    ``renorm_every`` samples.  Each stored sample carries the orthonormal
    frame together with its sandwich determinant, Plücker coordinates and
    symplectic-form drift.
    """
    a, b = settings.window
    if a < -pulse.L_f or b > pulse.L_f:
        raise ValueError(
            f"window [{a:g}, {b:g}] exceeds the pulse's half-period {pulse.L_f:g}"
        )
    nsteps = int(round((b - a) / settings.dx))
    if abs(a + nsteps * settings.dx - b) > 1e-9 * max(1.0, abs(b)):
        raise ValueError("window length must be an integer multiple of dx")
    xs = a + settings.dx * np.arange(nsteps + 1)

    rhs = _frame_rhs(pulse, lam)
    state = initial_frame(pulse.params, lam)
    samples = [_make_sample(xs[0], state)]
    k = 0
    while k < nsteps:
        k_next = min(k + settings.renorm_every, nsteps)
        segment = xs[k : k_next + 1]
        sol = solve_ivp(rhs, (segment[0], segment[-1]), state.ravel(),
                        t_eval=segment[1:], method=settings.method,
                        rtol=settings.rtol, atol=settings.atol)
        if not sol.success:
            raise RuntimeError(
                f"frame integration failed on [{segment[0]:g}, {segment[-1]:g}]: {sol.message}"
            )
        for j in range(sol.y.shape[1]):
            samples.append(_make_sample(segment[1 + j], sol.y[:, j].reshape(4, 2)))
        # renormalize: same span, positive-determinant change of basis
        state = samples[-1].frame.M
        k = k_next
    return FrameTrajectory(pulse=pulse, lam=lam, settings=settings, samples=tuple(samples))


def _make_sample(x: float, M: np.ndarray) -> PathSample:
    q, _ = _qr_positive(M)
    F = Frame(q)
    return PathSample(
        x=float(x),
        frame=F,
        deta=sandwich_determinant(F),
        plucker=plucker(F),
        omega_drift=is_lagrangian(F).residual,
    )


def write_trajectory(trajectory: FrameTrajectory, destination) -> None:
    """Write sample rows ``x, detA, P12..P34, omega_drift`` as CSV."""

    def _write(fh) -> None:
        writer = csv.writer(fh)
        writer.writerow(["x", "detA", "P12", "P13", "P14", "P23", "P24", "P34",
                         "omega_drift"])
        for s in trajectory.samples:
            writer.writerow([repr(s.x), repr(s.deta)]
                            + [repr(float(p)) for p in s.plucker]
                            + [repr(s.omega_drift)])

    if hasattr(destination, "write"):
        _write(destination)
    else:
        with open(Path(destination), "w", newline="") as fh:
            _write(fh)
