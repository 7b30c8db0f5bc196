"""Equivariant kernel bases ``K_i(x) = rho(f(x)) v_i`` and their checks.

`build_basis` carries out the four-step construction on a catalog geometry:
base point, stabiliser, section, then the fixed space ``V^H``.  The basis
vectors are ordered with a basis of the full-group invariants ``V^G`` first,
so that radial extensions to ``R^d`` (`rd_kernel`) can impose ``c_i(0) = 0``
on the remaining ones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb
from typing import Callable

import numpy as np

from .exceptions import DomainError, ParityError
from .invariants import DEFAULT_RANK_TOL, full_fixed_space
from .lie_core import (
    LieGroupSpec,
    Representation,
    det_twist,
    dual_rep,
    random_group_element,
    tensor_rep,
)
from .sections import HomogeneousSpace, sphere_section

__all__ = [
    "EquivariantBasis",
    "RadialProfileSet",
    "build_basis",
    "evaluate",
    "check_equivariance",
    "rd_kernel",
    "hom_rep_with_det_twist",
    "check_kernel_constraint",
    "spherical_harmonic_coefficients",
    "as_matrix",
]


def as_matrix(rep: Representation, vec: np.ndarray) -> np.ndarray:
    """Column-major reshape for matrix-valued representations."""
    if rep.matrix_shape is None:
        return vec
    return np.reshape(vec, rep.matrix_shape, order="F")


@dataclass(frozen=True, eq=False)
class EquivariantBasis:
    space: HomogeneousSpace
    rep: Representation
    invariant_vectors: np.ndarray
    invariant_count_full_group: int
    residual: float = 0.0

    @property
    def m(self) -> int:
        return self.invariant_vectors.shape[0]

    def __len__(self) -> int:
        return self.m

    def evaluate(self, x, i: int):
        return evaluate(self, x, i)

    def evaluate_all(self, x, flat: bool = False) -> list:
        """All ``m`` kernels at ``x`` from a single evaluation of ``rho(f(x))``."""
        x = self.space.normalize_point(x)
        vals = self.rep.group_eval(self.space.section(x)) @ self.invariant_vectors.T
        if flat:
            return [vals[:, i] for i in range(self.m)]
        return [as_matrix(self.rep, vals[:, i]) for i in range(self.m)]

    def __call__(self, x) -> list:
        return self.evaluate_all(x)


def _span_contains(rows: np.ndarray, v: np.ndarray, tol: float) -> bool:
    if rows.shape[0] == 0:
        return not np.abs(v).max() > tol
    coef, *_ = np.linalg.lstsq(rows.T, v, rcond=None)
    return float(np.abs(rows.T @ coef - v).max()) <= tol * max(1.0, float(np.abs(v).max()))


def build_basis(
    space: HomogeneousSpace, rep: Representation, tol: float = DEFAULT_RANK_TOL
) -> EquivariantBasis:
    """Basis of the ``G``-equivariant maps ``X -> V`` (one map per vector of ``V^H``)."""
    if rep.group.ambient_size != space.group.ambient_size:
        raise ValueError(
            f"representation of {rep.group.name} does not match geometry group {space.group.name}"
        )
    if space.projective and not rep.is_even(1e-10):
        raise ParityError(
            f"{space.key}: the group is a quotient by -Id, so rho(-Id) must be Id"
        )
    fixed_h = full_fixed_space(rep, space.stabilizer_generators, space.stabilizer_components, tol)
    fixed_g = full_fixed_space(
        rep, space.group.algebra_generators, space.group.component_reps, tol
    )
    rows = [v for v in fixed_g.echelon]
    for v in fixed_h.echelon:
        if len(rows) == fixed_h.dim:
            break
        current = np.array(rows) if rows else np.zeros((0, rep.dim), rep.dtype)
        if not _span_contains(current, v, 1e-8):
            rows.append(v)
    vectors = np.array(rows, dtype=rep.dtype) if rows else np.zeros((0, rep.dim), rep.dtype)
    return EquivariantBasis(
        space, rep, vectors, fixed_g.dim, max(fixed_h.residual, fixed_g.residual)
    )


def evaluate(basis: EquivariantBasis, x, i: int):
    """``rho(f(x)) v_i``, reshaped to a matrix for conjugation/Hom representations."""
    if not 0 <= i < basis.m:
        raise IndexError(f"kernel index {i} out of range for a basis of size {basis.m}")
    x = basis.space.normalize_point(x)
    g = basis.space.section(x)
    return as_matrix(basis.rep, basis.rep.group_eval(g) @ basis.invariant_vectors[i])


def check_equivariance(
    basis: EquivariantBasis,
    point_samples: int = 100,
    group_samples: int = 100,
    seed: int = 0,
    scale: float = 1.0,
    executor=None,
) -> float:
    """Largest ``|K_i(g x) - rho(g) K_i(x)|`` over random points and group elements.

    ``g = exp(sum_j t_j A_j)`` with ``t_j`` uniform in ``[-scale, scale]``.
    """
    if basis.m == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    space = basis.space
    points = space.sample_points(rng, point_samples)
    groups = [random_group_element(space.group, rng, scale) for _ in range(group_samples)]
    rhos = [basis.rep.group_eval(g) for g in groups]
    vt = basis.invariant_vectors.T

    def one_point(x):
        kx = basis.rep.group_eval(space.section(x)) @ vt
        worst = 0.0
        for g, r in zip(groups, rhos):
            gx = space.normalize_point(space.action(g, x))
            kgx = basis.rep.group_eval(space.section(gx)) @ vt
            worst = max(worst, float(np.abs(kgx - r @ kx).max()))
        return worst

    mapper = map if executor is None else executor.map
    return max(mapper(one_point, points))


# ---------------------------------------------------------------------------
# Extension to R^d.


@dataclass(frozen=True, eq=False)
class RadialProfileSet:
    """Radial profiles ``c_i`` for an `EquivariantBasis` over a sphere.

    Profiles ``c_i`` with ``i >= m_prime`` (0-based) must vanish at 0 and all
    profiles must pass a continuity probe at the origin.
    """

    profiles: tuple
    m_prime: int
    zero_tol: float = 1e-12
    cauchy_tol: float = 1e-6

    def __post_init__(self):
        object.__setattr__(self, "profiles", tuple(self.profiles))
        for i, c in enumerate(self.profiles):
            c0 = float(c(0.0))
            if i >= self.m_prime and abs(c0) > self.zero_tol:
                raise ValueError(
                    f"profile {i} must vanish at r = 0 (it multiplies a vector outside "
                    f"V^G); got c({i})(0) = {c0:.3g}"
                )
            probe = [float(c(10.0 ** -k)) for k in range(1, 9)]
            if abs(probe[-1] - probe[-2]) > self.cauchy_tol or abs(probe[-1] - c0) > self.cauchy_tol:
                raise ValueError(f"profile {i} is not continuous at r = 0")

    def __len__(self) -> int:
        return len(self.profiles)


class RdKernel:
    """``x -> sum_i c_i(|x|) rho(f_{d-1}(x)) v_i``, with ``f(0) = Id``."""

    def __init__(self, basis: EquivariantBasis, profiles: RadialProfileSet):
        self.basis = basis
        self.profiles = profiles
        self.d = basis.space.group.ambient_size

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.d,):
            raise DomainError(f"expected a point of R^{self.d}")
        r = float(np.sqrt(x @ x))
        coeffs = np.array([c(r) for c in self.profiles.profiles])
        v = coeffs @ self.basis.invariant_vectors
        g = np.eye(self.d) if r == 0.0 else sphere_section(x)
        return as_matrix(self.basis.rep, self.basis.rep.group_eval(g) @ v)


def rd_kernel(basis: EquivariantBasis, profiles: RadialProfileSet) -> RdKernel:
    if not basis.space.key.startswith("sphere"):
        raise ValueError("rd_kernel needs a basis built on a sphere geometry")
    if len(profiles) != basis.m:
        raise ValueError(f"need {basis.m} profiles, got {len(profiles)}")
    if profiles.m_prime != basis.invariant_count_full_group:
        raise ValueError("profile set was built for a different number of full-group invariants")
    return RdKernel(basis, profiles)


def hom_rep_with_det_twist(rep_in: Representation, rep_out: Representation) -> Representation:
    """``Hom(V_in, V_out)`` with ``m -> det(g)^-1 rho_out(g) m rho_in(g)^-1``."""
    base = tensor_rep(dual_rep(rep_in), rep_out)
    tw = det_twist(base, -1)
    return Representation(
        tw.group,
        tw.dim,
        tw.field,
        tw.group_eval,
        tw.algebra_eval,
        provenance="hom",
        matrix_shape=(rep_out.dim, rep_in.dim),
        components=(rep_in, rep_out),
    )


def check_kernel_constraint(
    kernel: Callable,
    rep_in: Representation,
    rep_out: Representation,
    group: LieGroupSpec,
    samples: int = 200,
    seed: int = 0,
) -> float:
    """Largest ``|K(g v) - det(g)^-1 rho_out(g) K(v) rho_in(g)^-1|`` over random ``g, v``."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    comps = list(group.component_reps)
    for s in range(samples):
        g = random_group_element(group, rng)
        if comps and s % 2:
            g = comps[s % len(comps)] @ g
        v = rng.normal(size=group.ambient_size)
        lhs = np.asarray(kernel(g @ v))
        rhs = rep_out.group_eval(g) @ np.asarray(kernel(v)) @ np.linalg.inv(rep_in.group_eval(g))
        rhs = rhs / np.linalg.det(g)
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


def spherical_harmonic_coefficients(m: int, z: complex) -> np.ndarray:
    """Coefficients of ``x^(2m-l) y^l`` in ``f(z) x^m y^m``, ``l = 0..2m``.

    Closed form ``(1+|z|^2)^-m * sum_{i+j=l} C(m,i) C(m,j) (-1)^i z^i conj(z)^(m-j)``.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    z = complex(z)
    if not math.isfinite(abs(z)):
        raise ValueError("z must be finite")
    zc = z.conjugate()
    out = np.zeros(2 * m + 1, dtype=complex)
    for i in range(m + 1):
        for j in range(m + 1):
            out[i + j] += comb(m, i) * comb(m, j) * (-1) ** i * z**i * zc ** (m - j)
    return out / (1.0 + abs(z) ** 2) ** m
