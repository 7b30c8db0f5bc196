"""Fixed subspaces ``V^H`` of a representation restricted to a subgroup.

The primary route solves ``d rho(h) v = 0`` for a basis of the stabiliser's
Lie algebra through one SVD of the stacked action matrices, then intersects
with the fixed space of finitely many component representatives.  The oracle
route (`haar_projector_rank`) averages ``rho(h)`` over a parametrised compact
subgroup with a tensor-product quadrature rule and never touches
``algebra_eval``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .exceptions import ProjectorError
from .lie_core import Representation, expm

__all__ = [
    "DEFAULT_RANK_TOL",
    "FixedSpaceResult",
    "SubgroupChart",
    "algebra_fixed_space",
    "discrete_refine",
    "full_fixed_space",
    "echelon_form",
    "orthonormalize",
    "haar_projector",
    "haar_projector_rank",
    "circle_chart",
    "so3_euler_chart",
    "su2_euler_chart",
    "point_chart",
]

DEFAULT_RANK_TOL = 1e-10
_SNAP = 1e-13


@dataclass(frozen=True, eq=False)
class FixedSpaceResult:
    """Basis of a fixed subspace.

    Attributes
    ----------
    basis : ndarray, shape (m, dim)
        Orthonormal rows spanning the fixed space.
    echelon : ndarray, shape (m, dim)
        The same span in reduced row echelon form.  This is the canonical,
        platform-independent basis; `basis` is its Gram-Schmidt image.
    rank_tolerance_used : float
    residual : float
        Largest ``|d rho(h) v|`` or ``|(rho(h) - Id) v|`` over the orthonormal
        basis vectors.
    provenance : tuple of str
        Flags such as ``"empty_generators"`` or ``"discrete_refined"``.
    """

    basis: np.ndarray
    echelon: np.ndarray
    rank_tolerance_used: float
    residual: float
    provenance: tuple = field(default=())

    @property
    def dim(self) -> int:
        return self.basis.shape[0]


def echelon_form(rows: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Reduced row echelon form of a full-row-rank matrix.

    Pivots are chosen column by column (largest magnitude among the rows not
    yet pivoted), pivot entries are exactly 1 and entries below ``1e-13`` in
    magnitude are set to zero.
    """
    a = np.array(rows, dtype=np.result_type(rows, np.float64), copy=True)
    m, n = a.shape
    if m == 0:
        return a
    scale = np.abs(a).max()
    row = 0
    for col in range(n):
        if row == m:
            break
        piv = row + int(np.argmax(np.abs(a[row:, col])))
        if abs(a[piv, col]) <= tol * scale:
            continue
        a[[row, piv]] = a[[piv, row]]
        a[row] = a[row] / a[row, col]
        for r in range(m):
            if r != row:
                a[r] = a[r] - a[r, col] * a[row]
        a[row, col] = 1.0
        row += 1
    if row < m:
        raise ValueError("rows are linearly dependent")
    if np.iscomplexobj(a):
        re, im = a.real.copy(), a.imag.copy()
        re[np.abs(re) < _SNAP] = 0.0
        im[np.abs(im) < _SNAP] = 0.0
        return re + 1j * im
    a[np.abs(a) < _SNAP] = 0.0
    return a


def orthonormalize(rows: np.ndarray) -> np.ndarray:
    """Gram-Schmidt (via QR) of the rows, in order, with positive diagonal."""
    if rows.shape[0] == 0:
        return rows.copy()
    q, r = np.linalg.qr(rows.T)
    d = np.diag(r)
    phase = d / np.abs(d)
    return (q * phase.conj()).T


def _nullspace_rows(stacked: np.ndarray, tol: float):
    """Rows spanning ``ker(stacked)``; singular values ``< tol * s_max`` count as zero."""
    n = stacked.shape[1]
    _, s, vh = np.linalg.svd(stacked)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return np.eye(n, dtype=stacked.dtype), smax
    rank = int(np.sum(s > tol * smax))
    return vh[rank:].conj(), smax


def _finish(rep_dtype, null_rows, tol, residual_fn, provenance) -> FixedSpaceResult:
    null_rows = null_rows.astype(rep_dtype)
    ech = echelon_form(null_rows) if null_rows.shape[0] else null_rows
    basis = orthonormalize(ech)
    return FixedSpaceResult(basis, ech, tol, residual_fn(basis), tuple(provenance))


def _algebra_residual(rep, gens, basis) -> float:
    if basis.shape[0] == 0 or not gens:
        return 0.0
    return max(float(np.abs(rep.algebra_eval(h) @ basis.T).max()) for h in gens)


def algebra_fixed_space(
    rep: Representation, stabilizer_generators: Sequence, tol: float = DEFAULT_RANK_TOL
) -> FixedSpaceResult:
    """Joint kernel of ``rep.algebra_eval(h)`` over the given generators."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    gens = [np.asarray(h) for h in stabilizer_generators]
    n = rep.group.ambient_size
    for h in gens:
        if h.shape != (n, n):
            raise ValueError(f"generator of shape {h.shape}, expected {(n, n)}")
    if not gens:
        eye = np.eye(rep.dim, dtype=rep.dtype)
        return FixedSpaceResult(eye, eye.copy(), tol, 0.0, ("empty_generators",))
    stacked = np.vstack([rep.algebra_eval(h) for h in gens]).astype(rep.dtype)
    null_rows, _ = _nullspace_rows(stacked, tol)
    return _finish(
        rep.dtype, null_rows, tol, lambda b: _algebra_residual(rep, gens, b), ()
    )


def discrete_refine(
    result: FixedSpaceResult,
    rep: Representation,
    reps_of_components: Sequence,
    tol: float = DEFAULT_RANK_TOL,
) -> FixedSpaceResult:
    """Intersect a fixed space with ``ker(rho(h) - Id)`` for each representative."""
    comps = [np.asarray(h) for h in reps_of_components]
    if not comps or result.dim == 0:
        return result
    b = result.basis
    eye = np.eye(rep.dim)
    stacked = np.vstack([(rep.group_eval(h) - eye) @ b.T for h in comps]).astype(rep.dtype)
    coeffs, _ = _nullspace_rows(stacked, tol)
    # each coefficient row c gives the vector sum_k c_k b_k
    rows = coeffs @ b

    def residual(basis):
        if basis.shape[0] == 0:
            return 0.0
        return max(float(np.abs((rep.group_eval(h) - eye) @ basis.T).max()) for h in comps)

    out = _finish(rep.dtype, rows, tol, residual, result.provenance + ("discrete_refined",))
    return FixedSpaceResult(
        out.basis, out.echelon, tol, max(out.residual, result.residual), out.provenance
    )


def full_fixed_space(
    rep: Representation,
    generators: Sequence,
    components: Sequence = (),
    tol: float = DEFAULT_RANK_TOL,
) -> FixedSpaceResult:
    """`algebra_fixed_space` followed by `discrete_refine`."""
    return discrete_refine(algebra_fixed_space(rep, generators, tol), rep, components, tol)


# ---------------------------------------------------------------------------
# Haar-averaging oracle.


@dataclass(frozen=True, eq=False)
class SubgroupChart:
    """Parametrisation ``theta -> h(theta)`` of a compact subgroup.

    ``axes`` lists ``(lo, hi, kind)`` with ``kind`` either ``"periodic"``
    (uniform trapezoid rule) or ``"gauss"`` (Gauss-Legendre nodes).  The Haar
    measure is ``density(theta) dtheta`` up to normalisation; the average is
    normalised by the total quadrature weight.
    """

    axes: tuple
    element: Callable[[np.ndarray], np.ndarray]
    density: Optional[Callable[[np.ndarray], float]] = None
    name: str = ""


def _axis_rule(lo, hi, kind, n):
    if kind == "periodic":
        return lo + (hi - lo) * np.arange(n) / n, np.full(n, (hi - lo) / n)
    if kind == "gauss":
        x, w = np.polynomial.legendre.leggauss(n)
        return lo + (hi - lo) * (x + 1) / 2, w * (hi - lo) / 2
    raise ValueError(f"unknown quadrature kind {kind!r}")


def haar_projector(rep: Representation, chart: SubgroupChart, quadrature_points: int = 32):
    """Quadrature approximation of ``int_H rho(h) dh`` (normalised)."""
    if chart.axes and quadrature_points < 8:
        raise ValueError("need at least 8 quadrature points per dimension")
    rules = [_axis_rule(lo, hi, kind, quadrature_points) for lo, hi, kind in chart.axes]
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij") if rules else []
    wgrids = np.meshgrid(*[r[1] for r in rules], indexing="ij") if rules else []
    thetas = np.stack([g.ravel() for g in grids], axis=1) if rules else np.zeros((1, 0))
    weights = np.prod(np.stack([w.ravel() for w in wgrids]), axis=0) if rules else np.ones(1)
    acc = np.zeros((rep.dim, rep.dim), dtype=complex)
    total = 0.0
    for theta, w in zip(thetas, weights):
        if chart.density is not None:
            w = w * chart.density(theta)
        acc += w * rep.group_eval(chart.element(theta))
        total += w
    p = acc / total
    return p.real if rep.field == "real" else p


def haar_projector_rank(
    rep: Representation,
    chart: SubgroupChart,
    quadrature_points: int = 32,
    tol: float = 1e-8,
) -> int:
    """Rank of the averaged projector; raises `ProjectorError` unless ``P^2 = P``."""
    p = haar_projector(rep, chart, quadrature_points)
    defect = float(np.abs(p @ p - p).max()) if p.size else 0.0
    if defect > 10 * tol:
        raise ProjectorError(
            f"averaged operator is not idempotent (|P^2 - P| = {defect:.3g}); "
            "check the parametrisation or increase quadrature_points"
        )
    return int(np.sum(np.linalg.svd(p, compute_uv=False) > tol))


def point_chart(size: int) -> SubgroupChart:
    """The trivial group."""
    return SubgroupChart((), lambda theta: np.eye(size), name="trivial")


def circle_chart(generator: np.ndarray, period: float = 2 * np.pi) -> SubgroupChart:
    """``theta -> expm(theta * generator)`` over one period."""
    gen = np.asarray(generator)
    return SubgroupChart(
        ((0.0, period, "periodic"),), lambda th: expm(th[0] * gen), name="circle"
    )


def _rot(n, i, j, angle):
    r = np.eye(n)
    c, s = np.cos(angle), np.sin(angle)
    r[i, i] = r[j, j] = c
    r[i, j], r[j, i] = -s, s
    return r


def so3_euler_chart(offset: int = 0, size: int = 3) -> SubgroupChart:
    """ZYZ Euler angles for SO(3) acting on coordinates ``offset..offset+2``."""
    x, y, z = offset, offset + 1, offset + 2

    def element(th):
        a, b, c = th
        return _rot(size, x, y, a) @ _rot(size, z, x, b) @ _rot(size, x, y, c)

    return SubgroupChart(
        ((0.0, 2 * np.pi, "periodic"), (0.0, np.pi, "gauss"), (0.0, 2 * np.pi, "periodic")),
        element,
        density=lambda th: np.sin(th[1]),
        name="SO(3) Euler",
    )


def su2_euler_chart() -> SubgroupChart:
    """``exp(a Z/2) exp(b Y/2) exp(c Z/2)`` with ``Z = diag(i, -i)``, ``Y = [[0,1],[-1,0]]``."""
    zg = np.array([[1j, 0], [0, -1j]])
    yg = np.array([[0, 1], [-1, 0]], dtype=complex)

    def element(th):
        a, b, c = th
        return expm(a * zg / 2) @ expm(b * yg / 2) @ expm(c * zg / 2)

    return SubgroupChart(
        ((0.0, 2 * np.pi, "periodic"), (0.0, np.pi, "gauss"), (0.0, 4 * np.pi, "periodic")),
        element,
        density=lambda th: np.sin(th[1]),
        name="SU(2) Euler",
    )
