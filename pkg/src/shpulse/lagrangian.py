"""Lagrangian-plane geometry: frames, crossing forms, and the Maslov index.

A plane of dimension ``n`` in ``R^{2n}`` is Lagrangian when the standard
symplectic form ``omega(u, v) = <u, J v>`` vanishes identically on it.  This
module represents planes by ``2n``-by-``n`` frame matrices and provides the
machinery needed to count how a one-parameter family of planes crosses a
fixed reference plane:

* graph coordinates: near ``t0`` every plane of the family is the graph
  ``{v + A(t) v : v in ell(t0)}`` of a matrix family ``A(t)`` taking values
  in a chosen complement ``W``, with ``A(t0) = 0``;
* crossing forms: the order-``j`` form on the intersection with the
  reference plane is the raw derivative ``Q_j(v) = d^j/dt^j omega(v, A(t) v)``
  at ``t0`` (no factorial normalisation), evaluated here by central finite
  differences with Richardson extrapolation;
* Maslov index: each isolated crossing contributes the signature of its
  first nondegenerate form when that order is odd, nothing when it is even,
  and boundary crossings are weighted by one half.

For ``n = 2`` the Plücker coordinates give a global chart used for trajectory
export and for the membership test of the train of the sandwich plane
``span{e2, e3}``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.optimize import brentq, minimize_scalar


class TransversalityError(RuntimeError):
    """Graph coordinates broke down: the complement is nearly tangent."""


class CrossingError(RuntimeError):
    """A crossing violates the assumptions of the signature calculus."""


class NotACrossingError(ValueError):
    """The plane family does not meet the reference at the given parameter."""


def standard_symplectic_matrix(n: int) -> np.ndarray:
    """Return ``J = [[0, I], [-I, 0]]`` acting on ``R^{2n}``."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = np.eye(n)
    J[n:, :n] = -np.eye(n)
    return J


def omega(u, v) -> float:
    """Standard symplectic form ``<u, J v>`` on ``R^{2n}``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1 or u.size % 2 or u.size == 0:
        raise ValueError("omega expects two vectors of equal even length")
    n = u.size // 2
    return float(u[:n] @ v[n:] - u[n:] @ v[:n])


@dataclass(frozen=True, eq=False)
class Frame:
    """A ``2n``-by-``n`` matrix whose columns span a plane in ``R^{2n}``."""

    M: np.ndarray

    def __post_init__(self) -> None:
        M = np.asarray(self.M, dtype=float)
        if M.ndim != 2 or M.shape[1] == 0 or M.shape[0] != 2 * M.shape[1]:
            raise ValueError(f"frame must be 2n-by-n, got shape {M.shape}")
        if not np.all(np.isfinite(M)):
            raise ValueError("frame entries must be finite")
        object.__setattr__(self, "M", M)

    @property
    def n(self) -> int:
        return self.M.shape[1]

    @property
    def X(self) -> np.ndarray:
        """Top n-by-n block."""
        return self.M[: self.n]

    @property
    def Y(self) -> np.ndarray:
        """Bottom n-by-n block."""
        return self.M[self.n :]

    def orthonormalized(self) -> "Frame":
        """Same span, orthonormal columns (QR with positive diagonal)."""
        q, _ = _qr_positive(self.M)
        return Frame(q)


def _frame_matrix(obj) -> np.ndarray:
    """Accept a Frame or a plain array and return the 2n-by-n matrix."""
    if isinstance(obj, Frame):
        return obj.M
    return Frame(np.asarray(obj, dtype=float)).M


def _qr_positive(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Thin QR with the diagonal of R forced positive.

    The sign fix makes Q depend smoothly on a smoothly varying full-rank M,
    so determinants of orthonormalized frames keep their sign along a path.
    """
    q, r = np.linalg.qr(M)
    s = np.sign(np.diag(r))
    s[s == 0] = 1.0
    return q * s, r * s[:, None]


@dataclass(frozen=True)
class LagrangianCheck:
    """Outcome of the Lagrangian test; truthy iff the plane passes."""

    ok: bool
    residual: float
    rank: int

    def __bool__(self) -> bool:
        return self.ok


def is_lagrangian(frame, tol: float = 1e-9) -> LagrangianCheck:
    """Check that a frame has full rank and isotropic span.

    The residual is ``max |X^T Y - Y^T X|`` evaluated on the orthonormalized
    frame, so it is invariant under column scaling.
    """
    M = _frame_matrix(frame)
    n = M.shape[1]
    rank = int(np.linalg.matrix_rank(M))
    q, _ = _qr_positive(M)
    S = q[:n].T @ q[n:]
    residual = float(np.max(np.abs(S - S.T)))
    return LagrangianCheck(ok=(rank == n and residual < tol), residual=residual, rank=rank)


@dataclass(frozen=True, eq=False)
class LagrangianPath:
    """A one-parameter family of Lagrangian planes.

    ``frame_fn`` must return a 2n-by-n frame matrix (or Frame) for any
    parameter where the family is defined; ``domain`` bounds the interval
    that scanning routines cover.  Derivative stencils may evaluate the
    family slightly outside the domain, so ``frame_fn`` should tolerate a
    small overhang when possible.  Optional precomputed ``samples`` are
    ``(t, Frame)`` pairs with strictly increasing parameters; each sampled
    frame must pass the Lagrangian check.
    """

    frame_fn: Callable[[float], np.ndarray]
    domain: tuple[float, float]
    samples: tuple | None = None

    def __post_init__(self) -> None:
        a, b = (float(self.domain[0]), float(self.domain[1]))
        if not (np.isfinite(a) and np.isfinite(b) and a < b):
            raise ValueError(f"domain must be a finite interval, got {self.domain}")
        object.__setattr__(self, "domain", (a, b))
        if self.samples is not None:
            cleaned = []
            previous = -np.inf
            for t, fr in self.samples:
                t = float(t)
                if t <= previous:
                    raise ValueError("sample parameters must be strictly increasing")
                previous = t
                fr = fr if isinstance(fr, Frame) else Frame(np.asarray(fr, dtype=float))
                check = is_lagrangian(fr)
                if not check:
                    raise ValueError(
                        f"sample at t = {t:.6g} is not Lagrangian "
                        f"(rank {check.rank}, residual {check.residual:.3e})"
                    )
                cleaned.append((t, fr))
            object.__setattr__(self, "samples", tuple(cleaned))

    def frame(self, t: float) -> Frame:
        F = self.frame_fn(float(t))
        return F if isinstance(F, Frame) else Frame(np.asarray(F, dtype=float))


# ---------------------------------------------------------------------------
# Plücker chart (n = 2)
# ---------------------------------------------------------------------------

PLUCKER_PAIRS: tuple[tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def plucker(frame) -> np.ndarray:
    """Unit-norm Plücker coordinates ``(P12, P13, P14, P23, P24, P34)``.

    The overall sign is inherited from the column orientation of the frame;
    right-multiplying by a matrix with positive determinant leaves the
    result unchanged, a negative determinant flips it.
    """
    M = _frame_matrix(frame)
    if M.shape != (4, 2):
        raise ValueError(f"the Plücker chart requires a 4-by-2 frame, got {M.shape}")
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[1] <= 1e-12 * sv[0]:
        raise ValueError("rank-deficient frame has no Plücker image")
    a, b = M[:, 0], M[:, 1]
    P = np.array([a[i] * b[j] - a[j] * b[i] for i, j in PLUCKER_PAIRS])
    return P / np.linalg.norm(P)


def sandwich_plane() -> Frame:
    """The reference plane ``span{e2, e3}``."""
    M = np.zeros((4, 2))
    M[1, 0] = 1.0
    M[2, 1] = 1.0
    return Frame(M)


def sandwich_train_contains(point, atol: float = 1e-9) -> bool:
    """Membership test for the projected train of ``span{e2, e3}``.

    Projected into the first three Plücker coordinates, the set of planes
    meeting ``span{e2, e3}`` nontrivially fills the two closed discs of
    radius 1/2 centred at ``(±1/2, 0)`` in the plane ``P14 = 0``.
    """
    x, y, z = (float(c) for c in point)
    if abs(z) > atol:
        return False
    return min((x - 0.5) ** 2, (x + 0.5) ** 2) + y * y <= 0.25 + atol


def write_plucker_trajectory(ts, frames, destination, deta=None) -> None:
    """Write rows ``t, P12..P34[, detA]`` as comma-separated text.

    The sign ambiguity of the coordinates is resolved by continuity: the
    first row has its first nonzero coordinate positive, and every later row
    is flipped if needed to align with its predecessor.
    """
    ts = [float(t) for t in ts]
    rows = [plucker(F) for F in frames]
    if len(ts) != len(rows):
        raise ValueError("ts and frames must have equal length")
    if deta is not None and len(deta) != len(rows):
        raise ValueError("deta must match the number of frames")
    if rows:
        first = rows[0]
        nz = np.flatnonzero(np.abs(first) > 1e-12)
        if nz.size and first[nz[0]] < 0:
            rows[0] = -first
        for k in range(1, len(rows)):
            if rows[k - 1] @ rows[k] < 0:
                rows[k] = -rows[k]

    def _write(fh) -> None:
        writer = csv.writer(fh)
        header = ["t", "P12", "P13", "P14", "P23", "P24", "P34"]
        if deta is not None:
            header.append("detA")
        writer.writerow(header)
        for k, (t, P) in enumerate(zip(ts, rows)):
            row = [repr(t)] + [repr(float(p)) for p in P]
            if deta is not None:
                row.append(repr(float(deta[k])))
            writer.writerow(row)

    if hasattr(destination, "write"):
        _write(destination)
    else:
        with open(Path(destination), "w", newline="") as fh:
            _write(fh)


# ---------------------------------------------------------------------------
# Graph coordinates and crossing forms
# ---------------------------------------------------------------------------


def _graph_images(L: np.ndarray, W: np.ndarray, V: np.ndarray, t: float,
                  cond_max: float = 1e10) -> np.ndarray:
    """Apply the graph map onto span(W) to the columns of V.

    For each column v the system ``[L | -W] (c; w) = v`` expresses
    ``v + W w`` as a combination of the columns of L; the image is ``W w``.
    """
    n = L.shape[1]
    S = np.hstack([L, -W])
    cond = np.linalg.cond(S)
    if not np.isfinite(cond) or cond > cond_max:
        raise TransversalityError(
            f"graph coordinates break down at t = {t:.6g}: "
            f"condition number {cond:.3e} exceeds {cond_max:.1e}"
        )
    z = np.linalg.solve(S, V)
    return W @ z[n:]


def graph_matrix(path: LagrangianPath, t0: float, t: float, W=None,
                 cond_max: float = 1e10) -> np.ndarray:
    """Matrix of the graph map representing ``ell(t)`` over ``ell(t0)``.

    Returns the 2n-by-2n matrix A(t) with
    ``ell(t) = {v + A(t) v : v in ell(t0)}`` whose range lies in span(W),
    extended by zero on the orthogonal complement of ``ell(t0)``.  By
    construction ``A(t0) = 0``.  ``W`` defaults to ``J ell(t0)``, the
    orthogonal complement of a Lagrangian plane.
    """
    L0 = path.frame(t0).M
    n = L0.shape[1]
    W = standard_symplectic_matrix(n) @ L0 if W is None else _frame_matrix(W)
    L = path.frame(t).M
    Z = _graph_images(L, W, L0, t, cond_max)
    return Z @ np.linalg.pinv(L0)


@lru_cache(maxsize=None)
def _stencil(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Central finite-difference stencil of width ``2*order + 1``.

    The weights solve the moment system sum_m w_m m^i = delta_{i,order} *
    order! for i = 0..2*order, which is the minimal symmetric stencil for
    the ``order``-th derivative.
    """
    m = np.arange(-order, order + 1)
    V = np.vstack([m.astype(float) ** i for i in range(2 * order + 1)])
    rhs = np.zeros(2 * order + 1)
    rhs[order] = float(math.factorial(order))
    w = np.linalg.solve(V, rhs)
    m.setflags(write=False)
    w.setflags(write=False)
    return m, w


def _fd_derivative(g: Callable[[float], np.ndarray], t0: float, order: int,
                   h: float, levels: int) -> np.ndarray:
    """Derivative of ``g`` at ``t0`` by central differences plus Richardson.

    The symmetric stencil has error terms in even powers of h starting at
    h^(order+1) for odd orders and h^(order+2) for even ones; each
    Richardson level halves the step and cancels the current leading term.
    """
    m, w = _stencil(order)
    p = order + 1 if order % 2 else order + 2

    def estimate(step: float) -> np.ndarray:
        vals = np.stack([np.asarray(g(t0 + k * step), dtype=float) for k in m])
        return np.tensordot(w, vals, axes=1) / step**order

    ests = [estimate(h / 2**k) for k in range(levels + 1)]
    for level in range(levels):
        f = 2.0 ** (p + 2 * level)
        ests = [(f * ests[k + 1] - ests[k]) / (f - 1.0) for k in range(len(ests) - 1)]
    return ests[0]


def _effective_step(W: np.ndarray, V: np.ndarray,
                    path: LagrangianPath, t0: float, h: float,
                    cond_max: float) -> float:
    """Widen the base step for slowly moving families.

    The graph map vanishes at t0, so ||A|| near t0 scales like speed * dt;
    a slow family would otherwise bury the finite differences in roundoff.
    The step is never shrunk and is capped at twenty times the base.
    """
    norms = []
    for t in (t0 - h, t0 + h):
        norms.append(np.linalg.norm(_graph_images(path.frame(t).M, W, V, t, cond_max)))
    speed = (norms[0] + norms[1]) / (2.0 * h * max(1.0, np.linalg.norm(V)))
    if speed <= 0.0:
        return 20.0 * h
    return h * min(max(1.0, 1.0 / speed), 20.0)


def quadratic_form(path: LagrangianPath, t0: float, v, order: int, W=None,
                   h: float = 0.01, richardson: int = 2,
                   cond_max: float = 1e10) -> float:
    """Raw crossing form ``Q_order(v) = d^order/dt^order omega(v, A(t) v)``.

    ``v`` must lie in the plane at ``t0``; it is used as given, without
    normalisation.  The value is invariant under symplectic transformations
    of the whole picture (path, vector and complement together).  The
    first-order form is independent of the choice of transverse complement
    ``W``; at higher orders the raw derivative picks up corrections from
    complements that mix the kernel with the moving directions, so results
    with a non-default ``W`` are only comparable for complements that keep
    those directions separate (the default ``J @ frame`` always qualifies).
    """
    if order < 1:
        raise ValueError("order must be a positive integer")
    v = np.asarray(v, dtype=float)
    F0 = path.frame(t0)
    n = F0.n
    if v.shape != (2 * n,):
        raise ValueError(f"vector must have length {2 * n}")
    W = standard_symplectic_matrix(n) @ F0.M if W is None else _frame_matrix(W)
    coeff, *_ = np.linalg.lstsq(F0.M, v, rcond=None)
    if np.linalg.norm(F0.M @ coeff - v) > 1e-8 * max(1.0, np.linalg.norm(v)):
        raise ValueError("vector does not lie in the plane at t0")
    V = v[:, None]

    def g(t: float) -> float:
        image = _graph_images(path.frame(t).M, W, V, t, cond_max)
        return omega(v, image[:, 0])

    h_eff = _effective_step(W, V, path, t0, h, cond_max)
    return float(_fd_derivative(g, t0, order, h_eff, richardson))


def intersection_basis(frame_a, frame_b, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis (2n-by-k) of the intersection of two spans."""
    A, _ = _qr_positive(_frame_matrix(frame_a))
    B, _ = _qr_positive(_frame_matrix(frame_b))
    stacked = np.hstack([A, -B])
    _, sv, vt = np.linalg.svd(stacked)
    small = sv <= tol * sv[0]
    if not np.any(small):
        return np.zeros((A.shape[0], 0))
    coeffs = vt[small.nonzero()[0]].T[: A.shape[1]]
    basis, _ = _qr_positive(A @ coeffs)
    return basis


@dataclass(frozen=True, eq=False)
class CrossingFormResult:
    """First nondegenerate crossing form at an isolated crossing.

    ``value`` is the form evaluated on the unit kernel vector when the
    kernel is one dimensional, otherwise the extreme eigenvalue of the form
    matrix.  ``lower_orders`` records the largest absolute form eigenvalue
    for each order below the reported one (all under the degeneracy
    tolerance by construction).
    """

    t0: float
    order: int
    value: float
    kernel_dim: int
    positive: int
    negative: int
    lower_orders: tuple[float, ...]
    kernel: np.ndarray = field(repr=False, default=None)
    form: np.ndarray = field(repr=False, default=None)

    @property
    def signature(self) -> int:
        return self.positive - self.negative


def crossing_form(path: LagrangianPath, t0: float, reference, max_order: int = 3,
                  W=None, h: float = 0.01, richardson: int = 2,
                  degeneracy_tol: float = 1e-6, kernel_tol: float = 1e-8,
                  cond_max: float = 1e10) -> CrossingFormResult:
    """Classify a crossing by its first nondegenerate form.

    The kernel of the crossing is the intersection of the plane at ``t0``
    with the reference plane, orthonormalized.  For each order j the form
    matrix ``d^j/dt^j omega(u_a, A(t) u_b)`` is evaluated on that basis; the
    first order whose eigenvalues all clear the degeneracy tolerance
    determines the result.  A form that is nonzero on part of the kernel
    only is outside the supported theory and raises CrossingError, as does
    full degeneracy through ``max_order``.
    """
    if max_order < 1:
        raise ValueError("max_order must be a positive integer")
    F0 = path.frame(t0)
    n = F0.n
    U = intersection_basis(F0, reference, kernel_tol)
    k = U.shape[1]
    if k == 0:
        raise NotACrossingError(
            f"the planes are transverse at t = {t0:.6g}; there is no crossing to classify"
        )
    W = standard_symplectic_matrix(n) @ F0.M if W is None else _frame_matrix(W)
    J = standard_symplectic_matrix(n)
    h_eff = _effective_step(W, U, path, t0, h, cond_max)

    def form_at(t: float) -> np.ndarray:
        return U.T @ J @ _graph_images(path.frame(t).M, W, U, t, cond_max)

    lower: list[float] = []
    for order in range(1, max_order + 1):
        G = _fd_derivative(form_at, t0, order, h_eff, richardson)
        G = 0.5 * (G + G.T)
        eigenvalues = np.linalg.eigvalsh(G)
        p = int(np.sum(eigenvalues > degeneracy_tol))
        q = int(np.sum(eigenvalues < -degeneracy_tol))
        if p + q == 0:
            lower.append(float(np.max(np.abs(eigenvalues))))
            continue
        if p + q < k:
            raise CrossingError(
                f"partially degenerate crossing at t = {t0:.6g}: the order-{order} "
                f"form is nondegenerate on only part of the {k}-dimensional kernel, "
                "which the signature calculus does not cover"
            )
        value = float(G[0, 0]) if k == 1 else float(eigenvalues[np.argmax(np.abs(eigenvalues))])
        return CrossingFormResult(
            t0=float(t0), order=order, value=value, kernel_dim=k,
            positive=p, negative=q, lower_orders=tuple(lower), kernel=U, form=G,
        )
    raise CrossingError(
        f"crossing at t = {t0:.6g} is degenerate through order {max_order}; "
        "raise max_order or inspect the family directly"
    )


def eigenvalue_motion(path: LagrangianPath, t0: float, reference,
                      half_width: float = 0.3, num: int = 61, W=None,
                      kernel_tol: float = 1e-8,
                      cond_max: float = 1e10) -> tuple[np.ndarray, np.ndarray]:
    """Small eigenvalues of the kernel-projected graph flow near a crossing.

    Returns ``(ts, lams)`` where ``lams[i]`` holds the ascending eigenvalues
    of the restriction of ``J A(t)`` to the crossing kernel at ``ts[i]``
    (shape ``(num, kernel_dim)``).  These are the eigenvalue branches whose
    signs and derivatives the crossing forms summarize.
    """
    F0 = path.frame(t0)
    n = F0.n
    U = intersection_basis(F0, reference, kernel_tol)
    if U.shape[1] == 0:
        raise NotACrossingError(
            f"the planes are transverse at t = {t0:.6g}; there is no eigenvalue branch to track"
        )
    W = standard_symplectic_matrix(n) @ F0.M if W is None else _frame_matrix(W)
    J = standard_symplectic_matrix(n)
    ts = np.linspace(t0 - half_width, t0 + half_width, num)
    lams = np.empty((num, U.shape[1]))
    for i, t in enumerate(ts):
        G = U.T @ J @ _graph_images(path.frame(t).M, W, U, t, cond_max)
        lams[i] = np.linalg.eigvalsh(0.5 * (G + G.T))
    return ts, lams


# ---------------------------------------------------------------------------
# Maslov index
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CrossingRecord:
    """One crossing's bookkeeping inside a Maslov index computation."""

    t: float
    order: int
    kernel_dim: int
    positive: int
    negative: int
    value: float
    contribution: float
    endpoint: str | None = None


@dataclass(frozen=True)
class MaslovResult:
    """Maslov index with a per-crossing ledger."""

    index: float
    crossings: tuple[CrossingRecord, ...]


def maslov_index(path: LagrangianPath, reference, a: float | None = None,
                 b: float | None = None, num: int = 1001, max_order: int = 3,
                 det_tol: float = 1e-8, dip_tol: float = 1e-6,
                 refine_tol: float = 1e-10, **form_kwargs) -> MaslovResult:
    """Maslov index of the family against a reference plane on [a, b].

    Crossings are located as sign changes of ``det [Q(t) | Q_ref]`` built
    from orthonormalized frames (refined by bisection), plus isolated dips
    of ``|det|`` below ``dip_tol`` that reach ``det_tol`` after local
    minimisation (even-order crossings touch zero without a sign change).
    Each crossing is classified with :func:`crossing_form`; interior
    crossings of odd order contribute their signature, interior even-order
    crossings contribute nothing, and endpoint crossings contribute half
    their one-sided spectral flow.
    """
    lo, hi = path.domain
    a = lo if a is None else float(a)
    b = hi if b is None else float(b)
    if not a < b:
        raise ValueError("empty parameter interval")
    ref_q = _frame_matrix(reference)
    ref_q, _ = _qr_positive(ref_q)

    def det_fn(t: float) -> float:
        q, _ = _qr_positive(path.frame(t).M)
        return float(np.linalg.det(np.hstack([q, ref_q])))

    ts = np.linspace(a, b, num)
    dets = np.array([det_fn(t) for t in ts])
    scale = float(np.max(np.abs(dets)))
    if scale < 1e-12:
        raise CrossingError(
            "the family coincides with the reference plane on the whole "
            "interval; crossings are not isolated"
        )

    crossing_ts: list[float] = []
    if abs(dets[0]) < det_tol * scale:
        crossing_ts.append(a)
    if abs(dets[-1]) < det_tol * scale:
        crossing_ts.append(b)
    for i in range(num - 1):
        if dets[i] == 0.0:
            if ts[i] != a and ts[i] != b:
                crossing_ts.append(float(ts[i]))
            continue
        if dets[i] * dets[i + 1] < 0.0:
            crossing_ts.append(float(brentq(det_fn, ts[i], ts[i + 1], xtol=refine_tol)))
    for i in range(1, num - 1):
        if (abs(dets[i]) < dip_tol * scale
                and abs(dets[i]) <= abs(dets[i - 1])
                and abs(dets[i]) <= abs(dets[i + 1])
                and dets[i - 1] * dets[i + 1] > 0.0
                and dets[i] != 0.0):
            res = minimize_scalar(lambda t: abs(det_fn(t)),
                                  bounds=(float(ts[i - 1]), float(ts[i + 1])),
                                  method="bounded",
                                  options={"xatol": refine_tol})
            if abs(res.fun) < det_tol * scale:
                crossing_ts.append(float(res.x))

    crossing_ts.sort()
    merged: list[float] = []
    merge_tol = max(100.0 * refine_tol, 1e-9 * (b - a))
    for t in crossing_ts:
        if not merged or t - merged[-1] > merge_tol:
            merged.append(min(max(t, a), b))

    records: list[CrossingRecord] = []
    total = 0.0
    end_tol = max(merge_tol, 1e-9 * (b - a))
    for t in merged:
        cf = crossing_form(path, t, reference, max_order=max_order, **form_kwargs)
        sig = cf.signature
        if abs(t - a) <= end_tol or abs(t - b) <= end_tol:
            endpoint = "left" if abs(t - a) <= end_tol else "right"
            contribution = 0.5 * sig
        else:
            endpoint = None
            contribution = float(sig) if cf.order % 2 else 0.0
        total += contribution
        records.append(CrossingRecord(
            t=t, order=cf.order, kernel_dim=cf.kernel_dim, positive=cf.positive,
            negative=cf.negative, value=cf.value, contribution=contribution,
            endpoint=endpoint,
        ))

    if abs(total - round(total)) < 1e-9:
        total = int(round(total))
    return MaslovResult(index=total, crossings=tuple(records))


# ---------------------------------------------------------------------------
# Analytic fixture families
# ---------------------------------------------------------------------------


def fixture_paths() -> tuple[LagrangianPath, LagrangianPath]:
    """Two analytic plane families with known crossings at the origin.

    Both consist of solutions of the linear flow ``q' = B q`` with

        B = [[0, 0, 1, 0], [0, 0, 0, 0], [0, -1, 0, 0], [-1, 0, 0, 0]],

    so every crossing form has a closed form against which the numerics can
    be pinned.  The first family crosses ``span{e2, e3}`` at ``t = 0`` with
    a regular (order-one) crossing; the second has a triply degenerate
    crossing there: its order-one and order-two forms vanish identically on
    the kernel and the order-three form is definite.
    """

    def frame_one(s: float) -> np.ndarray:
        return np.array([
            [-0.5 * s**2 + 2.0 * s, -3.0 * s**2 + 1.0],
            [1.0, 6.0],
            [2.0 - s, -6.0 * s],
            [s**3 / 6.0 - s**2, s**3 - s + 2.0],
        ])

    def frame_two(s: float) -> np.ndarray:
        return np.array([
            [-0.5 * s**2, -3.0 * s**2 + 1.0],
            [1.0, 6.0],
            [-s, -6.0 * s],
            [s**3 / 6.0, s**3 - s],
        ])

    domain = (-1.0, 1.0)
    return LagrangianPath(frame_one, domain), LagrangianPath(frame_two, domain)
