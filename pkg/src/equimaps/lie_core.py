"""Matrix groups and finite-dimensional representations.

Matrices are plain numpy arrays: ``float64`` for the real field and
``complex128`` for the complex field.  Group elements are ambient matrices,
Lie-algebra elements are ambient matrices in the tangent space at ``Id``.

A `Representation` carries two callables, ``group_eval`` (a homomorphism
into invertible matrices) and ``algebra_eval`` (its derivative at the
identity).  The constructors in this module build new representations from
old ones; every constructor keeps the two callables consistent so that
``group_eval(expm(t*A)) == expm(t*algebra_eval(A))``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

__all__ = [
    "REAL",
    "COMPLEX",
    "LieGroupSpec",
    "Representation",
    "as_mat",
    "expm",
    "so_algebra",
    "so_group",
    "su2_group",
    "sl2r_group",
    "sl2c_group",
    "se_group",
    "so11_group",
    "trivial_rep",
    "defining_rep",
    "linear_part_rep",
    "dual_rep",
    "tensor_rep",
    "direct_sum",
    "endo_conjugation_rep",
    "det_twist",
    "su2_polynomial_rep",
    "realify",
    "realify_matrix",
    "random_algebra_element",
    "random_group_element",
    "homomorphism_residual",
    "derivative_residual",
]

REAL = "real"
COMPLEX = "complex"


def as_mat(a, field: Optional[str] = None) -> np.ndarray:
    """Convert ``a`` to a finite 2-d array over the requested field.

    With ``field=None`` the field is inferred: complex input with a
    nonzero imaginary part stays complex, anything else becomes real.
    """
    m = np.atleast_2d(np.asarray(a))
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    if field is None:
        field = COMPLEX if np.iscomplexobj(m) and np.any(m.imag != 0) else REAL
    if field == REAL:
        if np.iscomplexobj(m):
            if np.any(m.imag != 0):
                raise ValueError("complex entries in a real matrix")
            m = m.real
        return m.astype(np.float64)
    if field == COMPLEX:
        return m.astype(np.complex128)
    raise ValueError(f"unknown field {field!r}")


def expm(a: np.ndarray) -> np.ndarray:
    """Matrix exponential (scaling and squaring with a Pade approximant)."""
    return scipy.linalg.expm(a)


def _field_of(*arrays) -> str:
    return COMPLEX if any(np.iscomplexobj(a) for a in arrays) else REAL


def _join_fields(*fields: str) -> str:
    return COMPLEX if COMPLEX in fields else REAL


@dataclass(frozen=True, eq=False)
class LieGroupSpec:
    """A matrix Lie group given by a basis of its (real) Lie algebra.

    Attributes
    ----------
    name : str
        Identifier used in reports.
    ambient_size : int
        Size of the square matrices.
    algebra_generators : tuple of ndarray
        Basis of the real Lie algebra.  Complex groups list both ``X`` and
        ``1j*X`` for each complex basis element.
    component_reps : tuple of ndarray
        Representatives of non-identity connected components (may be empty).
    """

    name: str
    ambient_size: int
    algebra_generators: tuple
    component_reps: tuple = ()

    def __post_init__(self):
        n = self.ambient_size
        gens = tuple(as_mat(a, _arr_field(a)) for a in self.algebra_generators)
        comps = tuple(as_mat(c, _arr_field(c)) for c in self.component_reps)
        for a in gens + comps:
            if a.shape != (n, n):
                raise ValueError(
                    f"{self.name}: generator of shape {a.shape}, expected {(n, n)}"
                )
        for c in comps:
            if abs(np.linalg.det(c)) < 1e-12:
                raise ValueError(f"{self.name}: component representative is singular")
        object.__setattr__(self, "algebra_generators", gens)
        object.__setattr__(self, "component_reps", comps)

    @property
    def field(self) -> str:
        return _field_of(*self.algebra_generators, *self.component_reps)

    @property
    def dimension(self) -> int:
        return len(self.algebra_generators)

    def identity(self) -> np.ndarray:
        return np.eye(self.ambient_size, dtype=np.complex128 if self.field == COMPLEX else float)


def _arr_field(a) -> str:
    a = np.asarray(a)
    return COMPLEX if np.iscomplexobj(a) and np.any(a.imag != 0) else REAL


@dataclass(frozen=True, eq=False)
class Representation:
    """A finite-dimensional representation of a `LieGroupSpec`.

    ``matrix_shape`` is set when vectors of the representation space are
    flattened matrices (conjugation and Hom representations); flattening is
    column-major throughout the package.
    """

    group: LieGroupSpec
    dim: int
    field: str
    group_eval: Callable[[np.ndarray], np.ndarray]
    algebra_eval: Callable[[np.ndarray], np.ndarray]
    provenance: str = "custom"
    matrix_shape: Optional[tuple] = None
    components: tuple = field(default=(), repr=False)

    def __call__(self, g) -> np.ndarray:
        return self.group_eval(np.asarray(g))

    def d(self, a) -> np.ndarray:
        return self.algebra_eval(np.asarray(a))

    @property
    def dtype(self):
        return np.complex128 if self.field == COMPLEX else np.float64

    def is_even(self, tol: float = 1e-12) -> bool:
        """True if ``-Id`` of the ambient group acts trivially."""
        minus = -np.eye(self.group.ambient_size)
        return bool(np.abs(self.group_eval(minus) - np.eye(self.dim)).max() <= tol)


def _cast(m: np.ndarray, fld: str) -> np.ndarray:
    if fld == REAL:
        if np.iscomplexobj(m):
            m = m.real
        return np.asarray(m, dtype=np.float64)
    return np.asarray(m, dtype=np.complex128)


# ---------------------------------------------------------------------------
# Standard groups.  Generator normalisations are conventions.


def _unit(n: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((n, n))
    e[i, j] = 1.0
    return e


def so_algebra(n: int, offset: int = 0, size: Optional[int] = None) -> list:
    """Basis ``E_ij - E_ji`` (i < j) of so(n), optionally embedded.

    With ``offset`` and ``size`` the generators act on coordinates
    ``offset .. offset+n-1`` of ``size``-dimensional space.
    """
    size = n + offset if size is None else size
    return [
        _unit(size, offset + j, offset + i) - _unit(size, offset + i, offset + j)
        for i in range(n)
        for j in range(i + 1, n)
    ]


def so_group(n: int) -> LieGroupSpec:
    return LieGroupSpec(f"SO({n})", n, tuple(so_algebra(n)))


_SU2_BASIS = (
    np.array([[1j, 0], [0, -1j]]),
    np.array([[0, 1], [-1, 0]], dtype=complex),
    np.array([[0, 1j], [1j, 0]]),
)
_SL2_BASIS = (
    np.array([[1.0, 0.0], [0.0, -1.0]]),
    np.array([[0.0, 1.0], [0.0, 0.0]]),
    np.array([[0.0, 0.0], [1.0, 0.0]]),
)


def su2_group() -> LieGroupSpec:
    return LieGroupSpec("SU(2)", 2, _SU2_BASIS)


def sl2r_group() -> LieGroupSpec:
    return LieGroupSpec("SL(2,R)", 2, _SL2_BASIS)


def sl2c_group() -> LieGroupSpec:
    """SL(2,C) as a six-dimensional real Lie group."""
    gens = tuple(a.astype(complex) for a in _SL2_BASIS) + tuple(1j * a for a in _SL2_BASIS)
    return LieGroupSpec("SL(2,C)", 2, gens)


def se_group(n: int) -> LieGroupSpec:
    """SE(n) as ``(n+1) x (n+1)`` affine matrices ``[[R, t], [0, 1]]``."""
    gens = so_algebra(n, size=n + 1) + [_unit(n + 1, i, n) for i in range(n)]
    return LieGroupSpec(f"SE({n})", n + 1, tuple(gens))


def so11_group() -> LieGroupSpec:
    return LieGroupSpec("SO+(1,1)", 2, (np.array([[0.0, 1.0], [1.0, 0.0]]),))


# ---------------------------------------------------------------------------
# Representation constructors.


def trivial_rep(group: LieGroupSpec, field: str = REAL) -> Representation:
    dt = np.complex128 if field == COMPLEX else np.float64
    return Representation(
        group,
        1,
        field,
        lambda g: np.ones((1, 1), dtype=dt),
        lambda a: np.zeros((1, 1), dtype=dt),
        provenance="trivial",
    )


def defining_rep(group: LieGroupSpec) -> Representation:
    fld = group.field
    return Representation(
        group,
        group.ambient_size,
        fld,
        lambda g: _cast(g, fld),
        lambda a: _cast(a, fld),
        provenance="defining",
    )


def linear_part_rep(group: LieGroupSpec, size: int) -> Representation:
    """The top-left ``size x size`` block, e.g. the rotation part of SE(n)."""
    fld = group.field
    return Representation(
        group,
        size,
        fld,
        lambda g: _cast(np.asarray(g)[:size, :size], fld),
        lambda a: _cast(np.asarray(a)[:size, :size], fld),
        provenance="linear",
    )


def dual_rep(rep: Representation) -> Representation:
    return Representation(
        rep.group,
        rep.dim,
        rep.field,
        lambda g: np.linalg.inv(rep.group_eval(g)).T,
        lambda a: -rep.algebra_eval(a).T,
        provenance="dual",
        components=(rep,),
    )


def tensor_rep(a: Representation, b: Representation) -> Representation:
    """Kronecker product ``a (x) b``; basis index ``i*dim(b) + j``."""
    _same_group(a, b)
    fld = _join_fields(a.field, b.field)
    ib = np.eye(b.dim)
    ia = np.eye(a.dim)
    return Representation(
        a.group,
        a.dim * b.dim,
        fld,
        lambda g: np.kron(a.group_eval(g), b.group_eval(g)),
        lambda x: np.kron(a.algebra_eval(x), ib) + np.kron(ia, b.algebra_eval(x)),
        provenance="tensor",
        components=(a, b),
    )


def direct_sum(*reps: Representation) -> Representation:
    if not reps:
        raise ValueError("direct_sum needs at least one representation")
    for r in reps[1:]:
        _same_group(reps[0], r)
    fld = _join_fields(*(r.field for r in reps))
    return Representation(
        reps[0].group,
        sum(r.dim for r in reps),
        fld,
        lambda g: _cast(scipy.linalg.block_diag(*(r.group_eval(g) for r in reps)), fld),
        lambda a: _cast(scipy.linalg.block_diag(*(r.algebra_eval(a) for r in reps)), fld),
        provenance="dsum",
        components=tuple(reps),
    )


def endo_conjugation_rep(rep: Representation) -> Representation:
    """``End(V)`` with ``m -> rho(g) m rho(g)^-1`` on column-major vectors."""
    n = rep.dim
    eye = np.eye(n)

    def group_eval(g):
        r = rep.group_eval(g)
        return np.kron(np.linalg.inv(r).T, r)

    def algebra_eval(a):
        x = rep.algebra_eval(a)
        return np.kron(eye, x) - np.kron(x.T, eye)

    return Representation(
        rep.group,
        n * n,
        rep.field,
        group_eval,
        algebra_eval,
        provenance="endo_conj",
        matrix_shape=(n, n),
        components=(rep,),
    )


def det_twist(rep: Representation, power: int) -> Representation:
    """Multiply by ``det(g)**power`` (ambient determinant)."""
    power = int(power)
    eye = np.eye(rep.dim)
    grp = rep.group
    fld = _join_fields(rep.field, grp.field)

    def group_eval(g):
        return _cast(np.linalg.det(g) ** power * rep.group_eval(g), fld)

    def algebra_eval(a):
        return _cast(rep.algebra_eval(a) + power * np.trace(a) * eye, fld)

    return Representation(
        grp,
        rep.dim,
        fld,
        group_eval,
        algebra_eval,
        provenance="det_twist",
        matrix_shape=rep.matrix_shape,
        components=(rep,),
    )


def _linear_form_powers(a, b, n: int) -> list:
    """Coefficient arrays (in powers of y) of ``(a x + b y)**k``, k = 0..n."""
    out = [np.array([1.0 + 0j])]
    base = np.array([a, b], dtype=complex)
    for _ in range(n):
        out.append(np.convolve(out[-1], base))
    return out


def su2_polynomial_rep(n: int, group: Optional[LieGroupSpec] = None) -> Representation:
    """Degree-``n`` binary forms with ``(g.p)(x, y) = p(g^-1 (x, y))``.

    The basis is ``x**(n-k) * y**k`` for ``k = 0..n``.  The formulas hold for
    any invertible 2x2 matrix, so ``group`` may be SU(2) (default) or SL(2,C).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    group = su2_group() if group is None else group
    if group.ambient_size != 2:
        raise ValueError("binary forms need a group of 2x2 matrices")

    def group_eval(g):
        h = np.linalg.inv(np.asarray(g, dtype=complex))
        xs = _linear_form_powers(h[0, 0], h[0, 1], n)
        ys = _linear_form_powers(h[1, 0], h[1, 1], n)
        out = np.zeros((n + 1, n + 1), dtype=complex)
        for k in range(n + 1):
            out[:, k] = np.convolve(xs[n - k], ys[k])
        return out

    def algebra_eval(a):
        m = -np.asarray(a, dtype=complex)
        out = np.zeros((n + 1, n + 1), dtype=complex)
        for k in range(n + 1):
            # d/dt of x^(n-k) y^k under x -> x + t(m00 x + m01 y), y -> y + t(m10 x + m11 y)
            out[k, k] += (n - k) * m[0, 0] + k * m[1, 1]
            if k < n:
                out[k + 1, k] += (n - k) * m[0, 1]
            if k > 0:
                out[k - 1, k] += k * m[1, 0]
        return out

    return Representation(
        group, n + 1, COMPLEX, group_eval, algebra_eval, provenance=f"su2_poly({n})"
    )


def realify_matrix(m: np.ndarray) -> np.ndarray:
    """Replace each entry ``a+bi`` by the block ``[[a, b], [-b, a]]``."""
    m = np.asarray(m, dtype=complex)
    p, q = m.shape
    out = np.empty((2 * p, 2 * q))
    out[0::2, 0::2] = m.real
    out[0::2, 1::2] = m.imag
    out[1::2, 0::2] = -m.imag
    out[1::2, 1::2] = m.real
    return out


def realify(rep: Representation) -> Representation:
    """Underlying real representation of a complex one (twice the dimension)."""
    if rep.field != COMPLEX:
        raise ValueError("realify expects a complex representation")
    return Representation(
        rep.group,
        2 * rep.dim,
        REAL,
        lambda g: realify_matrix(rep.group_eval(g)),
        lambda a: realify_matrix(rep.algebra_eval(a)),
        provenance="realified",
        components=(rep,),
    )


def _same_group(a: Representation, b: Representation) -> None:
    if a.group is not b.group and a.group.ambient_size != b.group.ambient_size:
        raise ValueError(f"representations of different groups: {a.group.name}, {b.group.name}")


# ---------------------------------------------------------------------------
# Sampling and self-checks.


def random_algebra_element(group: LieGroupSpec, rng: np.random.Generator, scale: float = 1.0):
    """``sum_j t_j A_j`` with ``t_j`` uniform in ``[-scale, scale]``."""
    gens = group.algebra_generators
    if not gens:
        return np.zeros((group.ambient_size,) * 2)
    t = rng.uniform(-scale, scale, size=len(gens))
    return sum(tj * a for tj, a in zip(t, gens))


def random_group_element(group: LieGroupSpec, rng: np.random.Generator, scale: float = 1.0):
    return expm(random_algebra_element(group, rng, scale))


def homomorphism_residual(rep: Representation, rng: np.random.Generator, samples: int = 10) -> float:
    worst = 0.0
    for _ in range(samples):
        t = rng.uniform(-1, 1)
        g1 = expm(t * random_algebra_element(rep.group, rng))
        g2 = expm(t * random_algebra_element(rep.group, rng))
        lhs = rep.group_eval(g1) @ rep.group_eval(g2)
        worst = max(worst, float(np.abs(lhs - rep.group_eval(g1 @ g2)).max()))
    return worst


def derivative_residual(
    rep: Representation, rng: np.random.Generator, samples: int = 5, step: float = 1e-5
) -> float:
    """Central-difference derivative of ``t -> rho(exp(tA))`` against ``d rho(A)``."""
    worst = 0.0
    for _ in range(samples):
        a = random_algebra_element(rep.group, rng)
        fd = (rep.group_eval(expm(step * a)) - rep.group_eval(expm(-step * a))) / (2 * step)
        worst = max(worst, float(np.abs(fd - rep.algebra_eval(a)).max()))
    return worst


def check_generators(mats: Sequence[np.ndarray], size: int) -> list:
    out = [np.asarray(m) for m in mats]
    for m in out:
        if m.shape != (size, size):
            raise ValueError(f"generator of shape {m.shape}, expected {(size, size)}")
    return out
