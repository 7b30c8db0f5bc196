"""Homogeneous spaces with explicit sections ``f: X -> G``, ``f(x) x0 = x``.

Each catalog record bundles the group, a base point, generators of the
stabiliser's Lie algebra, the section, the action and a point validator.
Projective groups (PSU(2), PSL(2,C)) are handled through an SU(2)/SL(2,C)
lift; representations used with them must be even.

Geometry identifiers: ``sphere``, ``euclidean``, ``h2``, ``h3``,
``riemann-sphere``, ``c2-punctured``, ``so11``.  The first two take a
dimension, written ``sphere(3)`` or ``euclidean(2)``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .exceptions import DomainError
from .invariants import (
    SubgroupChart,
    circle_chart,
    point_chart,
    so3_euler_chart,
    su2_euler_chart,
)
from .lie_core import (
    LieGroupSpec,
    sl2c_group,
    sl2r_group,
    so_algebra,
    so_group,
    se_group,
    so11_group,
    su2_group,
)

__all__ = [
    "GEOMETRY_IDS",
    "HomogeneousSpace",
    "INFINITY",
    "sphere_section",
    "euclidean_section",
    "h2_section",
    "h3_section",
    "riemann_sphere_section",
    "c2_section",
    "so11_section",
    "weyl_matrix",
    "weyl_point",
    "minkowski_q",
    "mobius",
    "riemann_mobius",
    "catalog",
    "get_space",
    "sphere_space",
    "euclidean_space",
    "h2_space",
    "h3_space",
    "riemann_sphere_space",
    "c2_punctured_space",
    "so11_space",
]

GEOMETRY_IDS = ("sphere", "euclidean", "h2", "h3", "riemann-sphere", "c2-punctured", "so11")
INFINITY = complex(math.inf, 0.0)
_PROJECT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class HomogeneousSpace:
    key: str
    group: LieGroupSpec
    base_point: object
    stabilizer_generators: tuple
    section: Callable
    action: Callable
    normalize_point: Callable
    sample_points: Callable
    distance: Callable
    excluded_set_description: str = ""
    projective: bool = False
    section_identity_at_base: bool = True
    stabilizer_components: tuple = ()
    stabilizer_chart: Optional[SubgroupChart] = None
    orbit_base_point: Optional[Callable] = None
    to_coords: Callable = None
    from_coords: Callable = None

    def valid_point(self, x) -> bool:
        try:
            self.normalize_point(x)
        except DomainError:
            return False
        return True

    def base_point_for(self, x):
        """Base point of the orbit containing ``x`` (one orbit except for ``so11``)."""
        if self.orbit_base_point is None:
            return self.base_point
        return self.orbit_base_point(x)

    @property
    def stabilizer_is_compact(self) -> bool:
        return self.stabilizer_chart is not None


# ---------------------------------------------------------------------------
# Spheres.


def sphere_section(x, n: Optional[int] = None) -> np.ndarray:
    """Gram-Schmidt section ``f_n`` of ``S^n = SO(n+1)/SO(n)`` at ``x != 0``.

    The first column is ``x / |x|``; the matrix is orthogonal with
    determinant 1 and depends only on the ray through ``x``.  On the set
    ``x_n = x_{n+1} = 0`` it is ``diag(f_{n-2}(x_1..x_{n-1}), 1, 1)``.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ValueError("sphere_section needs a vector of length >= 2")
    if n is not None and x.size != n + 1:
        raise ValueError(f"expected a point of R^{n + 1}, got length {x.size}")
    n = x.size - 1
    if not np.any(x):
        raise DomainError("sphere_section is undefined at the origin")
    if x[n - 1] == 0.0 and x[n] == 0.0:
        if n == 2:
            return np.eye(3) if x[0] > 0 else np.diag([-1.0, -1.0, 1.0])
        out = np.eye(n + 1)
        out[: n - 1, : n - 1] = sphere_section(x[: n - 1])
        return out
    # r[k] = |(x_k, ..., x_n)|, 0-based; each tail rescaled by its max to avoid underflow
    r = np.empty(n + 1)
    for k in range(n + 1):
        tail = x[k:]
        s = np.abs(tail).max()
        r[k] = s * np.sqrt(np.sum((tail / s) ** 2)) if s > 0 else 0.0
    f = np.zeros((n + 1, n + 1))
    f[:, 0] = x / r[0]
    for k in range(n - 1):
        f[k, k + 1] = r[k + 1] / r[k]
        f[k + 1 :, k + 1] = -(x[k] / r[k]) * (x[k + 1 :] / r[k + 1])
    sign = -1.0 if n % 2 else 1.0
    f[n - 1, n] = sign * x[n] / r[n - 1]
    f[n, n] = -sign * x[n - 1] / r[n - 1]
    return f


def sphere_space(n: int = 2, radius: float = 1.0) -> HomogeneousSpace:
    if n < 1:
        raise ValueError("sphere dimension must be >= 1")
    size = n + 1
    base = np.zeros(size)
    base[0] = radius

    def normalize(x):
        x = np.asarray(x, dtype=float)
        if x.shape != (size,):
            raise DomainError(f"expected a point of R^{size}")
        nrm = np.linalg.norm(x)
        if abs(nrm - radius) > _PROJECT_TOL:
            raise DomainError(f"point is not on the sphere of radius {radius}")
        return x * (radius / nrm)

    def sample(rng, count):
        pts = rng.normal(size=(count, size))
        return [radius * p / np.linalg.norm(p) for p in pts]

    if n == 1:
        chart = point_chart(size)
    elif n == 2:
        chart = circle_chart(so_algebra(2, offset=1, size=3)[0])
    elif n == 3:
        chart = so3_euler_chart(offset=1, size=4)
    else:
        chart = None
    return HomogeneousSpace(
        key=f"sphere({n})",
        group=so_group(size),
        base_point=base,
        stabilizer_generators=tuple(so_algebra(n, offset=1, size=size)),
        section=lambda x: sphere_section(x, n),
        action=lambda g, x: np.asarray(g) @ np.asarray(x),
        normalize_point=normalize,
        sample_points=sample,
        distance=lambda p, q: float(np.linalg.norm(np.asarray(p) - np.asarray(q))),
        excluded_set_description="none; f_n is discontinuous on x_n = x_{n+1} = 0",
        stabilizer_chart=chart,
        to_coords=lambda x: [float(v) for v in x],
        from_coords=lambda c: np.asarray(c, dtype=float),
    )


# ---------------------------------------------------------------------------
# Euclidean space.


def euclidean_section(x) -> np.ndarray:
    """Translation by ``x`` as an ``(n+1) x (n+1)`` affine matrix."""
    x = np.asarray(x, dtype=float).ravel()
    out = np.eye(x.size + 1)
    out[:-1, -1] = x
    return out


def _affine_action(g, x):
    g = np.asarray(g)
    n = g.shape[0] - 1
    return g[:n, :n] @ np.asarray(x) + g[:n, n]


def euclidean_space(n: int = 2) -> HomogeneousSpace:
    if n < 1:
        raise ValueError("euclidean dimension must be >= 1")

    def normalize(x):
        x = np.asarray(x, dtype=float)
        if x.shape != (n,):
            raise DomainError(f"expected a point of R^{n}")
        return x

    chart = {1: point_chart(2), 2: circle_chart(so_algebra(2, size=3)[0])}.get(n)
    if n == 3:
        chart = so3_euler_chart(offset=0, size=4)
    return HomogeneousSpace(
        key=f"euclidean({n})",
        group=se_group(n),
        base_point=np.zeros(n),
        stabilizer_generators=tuple(so_algebra(n, size=n + 1)),
        section=euclidean_section,
        action=_affine_action,
        normalize_point=normalize,
        sample_points=lambda rng, count: list(rng.normal(scale=2.0, size=(count, n))),
        distance=lambda p, q: float(np.linalg.norm(np.asarray(p) - np.asarray(q))),
        excluded_set_description="none",
        stabilizer_chart=chart,
        to_coords=lambda x: [float(v) for v in x],
        from_coords=lambda c: np.asarray(c, dtype=float),
    )


# ---------------------------------------------------------------------------
# Upper half plane.


def mobius(g, tau: complex) -> complex:
    g = np.asarray(g)
    return complex((g[0, 0] * tau + g[0, 1]) / (g[1, 0] * tau + g[1, 1]))


def h2_section(tau: complex) -> np.ndarray:
    """``[[sqrt(y), x/sqrt(y)], [0, 1/sqrt(y)]]`` for ``tau = x + iy``."""
    tau = complex(tau)
    x, y = tau.real, tau.imag
    if not y > 0:
        raise DomainError("h2_section needs Im(tau) > 0")
    s = math.sqrt(y)
    return np.array([[s, x / s], [0.0, 1.0 / s]])


def h2_space() -> HomogeneousSpace:
    def normalize(tau):
        tau = complex(tau)
        if not tau.imag > 0 or not math.isfinite(abs(tau)):
            raise DomainError("points of H^2 have positive imaginary part")
        return tau

    def sample(rng, count):
        xs = rng.uniform(-2, 2, size=count)
        ys = np.exp(rng.uniform(-1, 1, size=count))
        return [complex(a, b) for a, b in zip(xs, ys)]

    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    return HomogeneousSpace(
        key="h2",
        group=sl2r_group(),
        base_point=1j,
        stabilizer_generators=(rot,),
        section=h2_section,
        action=mobius,
        normalize_point=normalize,
        sample_points=sample,
        distance=lambda p, q: abs(complex(p) - complex(q)),
        excluded_set_description="Im(tau) <= 0",
        stabilizer_chart=circle_chart(rot),
        to_coords=lambda t: [complex(t).real, complex(t).imag],
        from_coords=lambda c: complex(c[0], c[1]),
    )


# ---------------------------------------------------------------------------
# Hyperbolic 3-space (hyperboloid model, Weyl representation).


def minkowski_q(p) -> float:
    p = np.asarray(p, dtype=float)
    return float(-p[0] ** 2 + np.sum(p[1:] ** 2))


def weyl_matrix(p) -> np.ndarray:
    """``(t, x, y, z) -> [[t+z, x-iy], [x+iy, t-z]]``."""
    t, x, y, z = np.asarray(p, dtype=float)
    return np.array([[t + z, x - 1j * y], [x + 1j * y, t - z]])


def weyl_point(a) -> np.ndarray:
    a = np.asarray(a)
    t = 0.5 * (a[0, 0] + a[1, 1]).real
    z = 0.5 * (a[0, 0] - a[1, 1]).real
    return np.array([t, a[1, 0].real, a[1, 0].imag, z])


def _h3_normalize(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (4,):
        raise DomainError("points of H^3 are (t, x, y, z)")
    if abs(minkowski_q(p) + 1.0) > _PROJECT_TOL or p[0] < 1.0 - _PROJECT_TOL:
        raise DomainError("point is not on the upper sheet -t^2+x^2+y^2+z^2 = -1")
    out = p.copy()
    out[0] = math.sqrt(1.0 + float(np.sum(p[1:] ** 2)))
    return out


def h3_section(p) -> np.ndarray:
    """Positive hermitian ``g`` in SL(2,C) with ``g g^* = weyl_matrix(p)``."""
    t, x, y, z = _h3_normalize(p)
    c = 1.0 / (math.sqrt(2.0) * math.sqrt(t + 1.0))
    return c * np.array([[t + 1 + z, x - 1j * y], [x + 1j * y, t + 1 - z]])


def h3_space() -> HomogeneousSpace:
    def action(g, p):
        g = np.asarray(g)
        return weyl_point(g @ weyl_matrix(p) @ g.conj().T)

    def sample(rng, count):
        out = []
        for v in rng.normal(scale=0.8, size=(count, 3)):
            out.append(np.concatenate([[math.sqrt(1.0 + v @ v)], v]))
        return out

    return HomogeneousSpace(
        key="h3",
        group=sl2c_group(),
        base_point=np.array([1.0, 0.0, 0.0, 0.0]),
        stabilizer_generators=tuple(su2_group().algebra_generators),
        section=h3_section,
        action=action,
        normalize_point=_h3_normalize,
        sample_points=sample,
        distance=lambda p, q: float(np.linalg.norm(np.asarray(p) - np.asarray(q))),
        excluded_set_description="points off the upper sheet of the hyperboloid",
        projective=True,
        stabilizer_chart=su2_euler_chart(),
        to_coords=lambda p: [float(v) for v in p],
        from_coords=lambda c: np.asarray(c, dtype=float),
    )


# ---------------------------------------------------------------------------
# Riemann sphere.


def _is_inf(z) -> bool:
    return not math.isfinite(abs(complex(z)))


def riemann_mobius(g, z) -> complex:
    g = np.asarray(g)
    a, b, c, d = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    if _is_inf(z):
        return INFINITY if c == 0 else complex(a / c)
    den = c * z + d
    if den == 0:
        return INFINITY
    return complex((a * z + b) / den)


def riemann_sphere_section(z) -> np.ndarray:
    """SU(2) lift sending 0 to ``z``; top-left entry is real and positive."""
    if _is_inf(z):
        return np.array([[0, -1], [1, 0]], dtype=complex)
    z = complex(z)
    s = 1.0 / math.sqrt(1.0 + abs(z) ** 2)
    return s * np.array([[1.0, z], [-z.conjugate(), 1.0]])


def _chordal(p, q) -> float:
    if _is_inf(p) and _is_inf(q):
        return 0.0
    if _is_inf(p):
        p, q = q, p
    p = complex(p)
    if _is_inf(q):
        return 2.0 / math.sqrt(1 + abs(p) ** 2)
    q = complex(q)
    return 2 * abs(p - q) / math.sqrt((1 + abs(p) ** 2) * (1 + abs(q) ** 2))


def riemann_sphere_space() -> HomogeneousSpace:
    def normalize(z):
        if isinstance(z, str):
            if z.lower() in ("inf", "infinity"):
                return INFINITY
            raise DomainError(f"bad point {z!r}")
        return INFINITY if _is_inf(z) else complex(z)

    def sample(rng, count):
        v = rng.normal(size=(count, 2))
        return [complex(a, b) for a, b in v]

    def to_coords(z):
        return "inf" if _is_inf(z) else [complex(z).real, complex(z).imag]

    def from_coords(c):
        if isinstance(c, str):
            return normalize(c)
        return complex(c[0], c[1])

    torus = np.array([[1j, 0], [0, -1j]])
    return HomogeneousSpace(
        key="riemann-sphere",
        group=su2_group(),
        base_point=0j,
        stabilizer_generators=(torus,),
        section=riemann_sphere_section,
        action=riemann_mobius,
        normalize_point=normalize,
        sample_points=sample,
        distance=_chordal,
        excluded_set_description="none; the section is discontinuous at infinity",
        projective=True,
        stabilizer_chart=circle_chart(torus),
        to_coords=to_coords,
        from_coords=from_coords,
    )


# ---------------------------------------------------------------------------
# C^2 minus the origin.


def c2_section(v) -> np.ndarray:
    """``[[x, -y/r2], [y, x/r2]]`` with ``r2 = x^2 + y^2`` (complex, no conjugation)."""
    x, y = np.asarray(v, dtype=complex)
    r2 = x * x + y * y
    scale = abs(x) ** 2 + abs(y) ** 2
    if scale == 0 or abs(r2) <= 1e-12 * scale:
        raise DomainError("c2_section is undefined on the cone x^2 + y^2 = 0")
    return np.array([[x, -y / r2], [y, x / r2]])


def c2_punctured_space() -> HomogeneousSpace:
    def normalize(v):
        v = np.asarray(v, dtype=complex)
        if v.shape != (2,):
            raise DomainError("points of C^2 are pairs (x, y)")
        c2_section(v)
        return v

    def sample(rng, count):
        out = []
        while len(out) < count:
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            if abs(v[0] ** 2 + v[1] ** 2) >= 0.25:
                out.append(v)
        return out

    def from_coords(c):
        vals = [complex(a[0], a[1]) if isinstance(a, (list, tuple)) else complex(a) for a in c]
        return np.asarray(vals, dtype=complex)

    e = np.array([[0, 1], [0, 0]], dtype=complex)
    return HomogeneousSpace(
        key="c2-punctured",
        group=sl2c_group(),
        base_point=np.array([1.0, 0.0], dtype=complex),
        stabilizer_generators=(e, 1j * e),
        section=c2_section,
        action=lambda g, v: np.asarray(g) @ np.asarray(v),
        normalize_point=normalize,
        sample_points=sample,
        distance=lambda p, q: float(np.linalg.norm(np.asarray(p) - np.asarray(q))),
        excluded_set_description="the cone x^2 + y^2 = 0 (includes the origin)",
        to_coords=lambda v: [[complex(a).real, complex(a).imag] for a in v],
        from_coords=from_coords,
    )


# ---------------------------------------------------------------------------
# SO+(1,1) orbits in R^2 \ {Q = 0}.


def _q11(p) -> float:
    t, x = p
    return float(-t * t + x * x)


def so11_section(p) -> np.ndarray:
    """``[[t, x], [x, t]] / sqrt(-Q)`` if ``Q < 0``, ``[[x, t], [t, x]] / sqrt(Q)`` if ``Q > 0``."""
    t, x = np.asarray(p, dtype=float)
    q = _q11((t, x))
    if q == 0.0 or abs(q) <= 1e-12 * (t * t + x * x):
        raise DomainError("so11_section is undefined on the light cone Q = -t^2 + x^2 = 0")
    if q < 0:
        return np.array([[t, x], [x, t]]) / math.sqrt(-q)
    return np.array([[x, t], [t, x]]) / math.sqrt(q)


def so11_space() -> HomogeneousSpace:
    def normalize(p):
        p = np.asarray(p, dtype=float)
        if p.shape != (2,):
            raise DomainError("points are (t, x)")
        so11_section(p)
        return p

    def base_for(p):
        q = _q11(np.asarray(p, dtype=float))
        return np.array([math.sqrt(-q), 0.0]) if q < 0 else np.array([0.0, math.sqrt(q)])

    def sample(rng, count):
        out = []
        while len(out) < count:
            p = rng.normal(size=2)
            if abs(_q11(p)) >= 0.1:
                out.append(p)
        return out

    return HomogeneousSpace(
        key="so11",
        group=so11_group(),
        base_point=np.array([1.0, 0.0]),
        stabilizer_generators=(),
        section=so11_section,
        action=lambda g, p: np.asarray(g) @ np.asarray(p),
        normalize_point=normalize,
        sample_points=sample,
        distance=lambda p, q: float(np.linalg.norm(np.asarray(p) - np.asarray(q))),
        excluded_set_description="the light cone Q = -t^2 + x^2 = 0",
        stabilizer_chart=point_chart(2),
        orbit_base_point=base_for,
        to_coords=lambda p: [float(v) for v in p],
        from_coords=lambda c: np.asarray(c, dtype=float),
    )


# ---------------------------------------------------------------------------

_BUILDERS = {
    "sphere": sphere_space,
    "euclidean": euclidean_space,
    "h2": h2_space,
    "h3": h3_space,
    "riemann-sphere": riemann_sphere_space,
    "c2-punctured": c2_punctured_space,
    "so11": so11_space,
}
_ID_RE = re.compile(r"^\s*([a-z0-9-]+)\s*(?:\(\s*(\d+)\s*\))?\s*$")


def get_space(identifier: str, n: Optional[int] = None) -> HomogeneousSpace:
    """Look up a catalog geometry, e.g. ``get_space("sphere(3)")``."""
    m = _ID_RE.match(identifier)
    if not m or m.group(1) not in _BUILDERS:
        raise KeyError(f"unknown geometry {identifier!r}; expected one of {GEOMETRY_IDS}")
    key, arg = m.group(1), m.group(2)
    if arg is not None:
        n = int(arg)
    if key in ("sphere", "euclidean"):
        return _BUILDERS[key](2 if n is None else n)
    if arg is not None:
        raise KeyError(f"geometry {key!r} takes no dimension")
    return _BUILDERS[key]()


def catalog(sphere_dim: int = 2, euclidean_dim: int = 2) -> list:
    return [
        sphere_space(sphere_dim),
        euclidean_space(euclidean_dim),
        h2_space(),
        h3_space(),
        riemann_sphere_space(),
        c2_punctured_space(),
        so11_space(),
    ]
