"""Algebra structure of automorphic algebras.

Structure constants of fixed-point subalgebras, their transport along an
equivariant basis, certificates for the cyclic nilpotent algebras
``C[T]/(T^(n+1))``, the Wedderburn decomposition of real semisimple matrix
algebras into blocks ``gl(r,R)``, ``gl(c,C)``, ``gl(h,H)``, and invariant
vector fields ``N_g(h)/h``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .exceptions import ClosureError, NonSemisimpleError, NumericalError, SpecError
from .invariants import echelon_form
from .kernels import EquivariantBasis, as_matrix
from .lie_core import random_group_element

__all__ = [
    "StructureConstants",
    "NilpotentCertificate",
    "Block",
    "ClassificationReport",
    "matrix_product",
    "structure_constants",
    "pointwise_structure_match",
    "cyclic_nilpotent_certificate",
    "classify_commutant",
    "invariant_vector_fields",
]


def matrix_product(shape: tuple) -> Callable:
    """Matrix multiplication on column-major flattened ``shape`` matrices."""

    def product(a, b):
        ma = np.reshape(a, shape, order="F")
        mb = np.reshape(b, shape, order="F")
        return np.reshape(ma @ mb, -1, order="F")

    return product


@dataclass(frozen=True, eq=False)
class StructureConstants:
    """``v_i v_j = sum_k table[i, j, k] v_k``."""

    dim: int
    table: np.ndarray
    residual: float


def structure_constants(vectors, product: Callable, tol: float = 1e-9) -> StructureConstants:
    vecs = np.asarray(vectors)
    k = vecs.shape[0]
    basis = vecs.T
    if k and np.linalg.matrix_rank(basis) < k:
        raise ValueError("vectors are linearly dependent")
    table = np.zeros((k, k, k), dtype=np.result_type(vecs, float))
    residual = 0.0
    for i in range(k):
        for j in range(k):
            p = np.asarray(product(vecs[i], vecs[j]))
            c, *_ = np.linalg.lstsq(basis, p, rcond=None)
            table[i, j] = c
            residual = max(residual, float(np.abs(basis @ c - p).max()))
    if residual > tol:
        raise ClosureError(f"products leave the span (residual {residual:.3g})")
    return StructureConstants(k, table, residual)


def pointwise_structure_match(
    basis: EquivariantBasis,
    product: Callable,
    x,
    tol: float = 1e-9,
    seed: int = 0,
    automorphism_samples: int = 5,
) -> float:
    """Largest difference between the structure constants of ``{K_i(x)}`` and ``{v_i}``."""
    rep = basis.rep
    rng = np.random.default_rng(seed)
    for _ in range(automorphism_samples):
        g = random_group_element(basis.space.group, rng)
        r = rep.group_eval(g)
        a, b = rng.normal(size=(2, rep.dim))
        gap = np.abs(r @ product(a, b) - product(r @ a, r @ b)).max()
        if gap > 1e-8 * max(1.0, float(np.abs(r).max()) ** 2):
            raise SpecError("the representation does not act by algebra automorphisms")
    ref = structure_constants(basis.invariant_vectors, product, tol)
    here = structure_constants(np.array(basis.evaluate_all(x, flat=True)), product, tol)
    return float(np.abs(ref.table - here.table).max()) if ref.dim else 0.0


@dataclass(frozen=True, eq=False)
class NilpotentCertificate:
    passed: bool
    n: int
    rank: int
    top_power_norm: float
    powers: tuple = field(repr=False, default=())


def cyclic_nilpotent_certificate(e_image, n: int, tol: float = 1e-10) -> NilpotentCertificate:
    """Check ``E^(n+1) = 0`` and that ``Id, E, ..., E^n`` are independent."""
    e = np.asarray(e_image)
    powers = [np.eye(e.shape[0], dtype=e.dtype)]
    for _ in range(n + 1):
        powers.append(powers[-1] @ e)
    scale = max(1.0, float(np.abs(e).max())) ** (n + 1)
    top = float(np.abs(powers[n + 1]).max())
    stacked = np.array([p.ravel() for p in powers[: n + 1]])
    s = np.linalg.svd(stacked, compute_uv=False)
    rank = int(np.sum(s > 1e-10 * s[0]))
    passed = top <= tol * scale and rank == n + 1
    return NilpotentCertificate(passed, n, rank, top, tuple(powers))


# ---------------------------------------------------------------------------
# Wedderburn blocks of real semisimple algebras.


@dataclass(frozen=True, eq=False)
class Block:
    division_type: str  # "R", "C" or "H"
    multiplicity: int
    dimension: int
    idempotent: np.ndarray = field(repr=False)
    witnesses: dict = field(repr=False, default_factory=dict)
    signature: int = 0


@dataclass(frozen=True, eq=False)
class ClassificationReport:
    blocks: tuple
    residual: float
    dimension: int

    def summary(self) -> list:
        return [(b.division_type, b.multiplicity) for b in self.blocks]


_TYPE_ORDER = {"R": 0, "C": 1, "H": 2}


def _rank(rows: np.ndarray, rel: float = 1e-9) -> int:
    if rows.size == 0:
        return 0
    s = np.linalg.svd(rows, compute_uv=False)
    return int(np.sum(s > rel * s[0])) if s[0] > 0 else 0


def _span_basis(mats, rel: float = 1e-9) -> list:
    """Orthonormal (Frobenius) basis of the span of the given matrices."""
    shape = mats[0].shape
    rows = np.array([m.ravel() for m in mats])
    u, s, vh = np.linalg.svd(rows, full_matrices=False)
    keep = int(np.sum(s > rel * s[0])) if s.size and s[0] > 0 else 0
    return [vh[i].reshape(shape) for i in range(keep)]


class _Algebra:
    """Coordinates for a matrix algebra with a fixed basis."""

    def __init__(self, mats):
        self.mats = mats
        self.shape = mats[0].shape
        self.rows = np.array([m.ravel() for m in mats])

    def coords(self, m):
        c, *_ = np.linalg.lstsq(self.rows.T, np.ravel(m), rcond=None)
        return c, float(np.abs(self.rows.T @ c - np.ravel(m)).max())

    def element(self, c):
        return np.reshape(self.rows.T @ c, self.shape)


def _signature(mats, rel: float = 1e-9) -> int:
    gram = np.array([[np.trace(a @ b) for b in mats] for a in mats])
    gram = 0.5 * (gram + gram.T)
    w = np.linalg.eigvalsh(gram)
    cut = rel * np.abs(w).max()
    return int(np.sum(w > cut) - np.sum(w < -cut))


def _central_idempotents(alg: _Algebra, center: list, rng, tries: int):
    """Primitive central idempotents via the regular action of a random central element."""
    c = len(center)
    cen = _Algebra(center)
    for _ in range(tries):
        z = sum(w * m for w, m in zip(rng.normal(size=c), center))
        lz = np.column_stack([cen.coords(z @ m)[0] for m in center])
        evals, evecs = np.linalg.eig(lz)
        scale = max(1.0, float(np.abs(evals).max()))
        gaps = [abs(a - b) for i, a in enumerate(evals) for b in evals[i + 1 :]]
        if gaps and min(gaps) < 1e-6 * scale:
            continue
        idems, used = [], np.zeros(c, dtype=bool)
        for i, lam in enumerate(evals):
            if used[i]:
                continue
            used[i] = True
            if abs(lam.imag) <= 1e-9 * scale:
                u = cen.element(evecs[:, i].real)
                # u = alpha * e with u^2 = alpha * u
                alpha = np.vdot(u.ravel(), (u @ u).ravel()).real / np.vdot(u.ravel(), u.ravel()).real
                idems.append(u / alpha)
            else:
                j = int(np.argmin(np.abs(evals - lam.conjugate()) + used * 1e300))
                used[j] = True
                u1 = cen.element(evecs[:, i].real)
                u2 = cen.element(evecs[:, i].imag)
                # the identity of span{u1, u2} solves e u1 = u1, e u2 = u2
                lhs = np.column_stack(
                    [np.concatenate([(a @ u1).ravel(), (a @ u2).ravel()]) for a in (u1, u2)]
                )
                rhs = np.concatenate([u1.ravel(), u2.ravel()])
                ab, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
                idems.append(ab[0] * u1 + ab[1] * u2)
        ok = all(np.abs(e @ e - e).max() <= 1e-8 * max(1.0, np.abs(e).max()) for e in idems)
        total = sum(idems)
        if ok and np.abs(total - np.eye(alg.shape[0])).max() <= 1e-8:
            return idems
    raise NumericalError("could not separate central idempotents (eigenvalue gaps too small)")


def _split_idempotent(alg: _Algebra, p: np.ndarray, rng, tries: int):
    """A proper idempotent ``q < p`` inside ``p A p``, or ``None``."""
    n = p.shape[0]
    u, s, _ = np.linalg.svd(p)
    rk = int(np.sum(s > 1e-9 * s[0]))
    basis_u = u[:, :rk]
    left = np.linalg.pinv(basis_u) @ p
    pap = _span_basis([p @ m @ p for m in alg.mats])
    for _ in range(tries):
        y = sum(w * m for w, m in zip(rng.normal(size=len(pap)), pap))
        ysub = left @ y @ basis_u
        evals, evecs = np.linalg.eig(ysub)
        scale = max(1.0, float(np.abs(evals).max()))
        ref = evals[0]
        sel = (np.abs(evals - ref) <= 1e-6 * scale) | (np.abs(evals - ref.conjugate()) <= 1e-6 * scale)
        if sel.all():
            continue
        inv = np.linalg.inv(evecs)
        psub = (evecs[:, sel] @ inv[sel, :]).real
        q = basis_u @ psub @ left
        c, res = alg.coords(q)
        q = alg.element(c)
        if res <= 1e-7 and np.abs(q @ q - q).max() <= 1e-7 and np.abs(q @ p - q).max() <= 1e-7:
            return q
    return None


def _quaternion_witness(alg: _Algebra, e: np.ndarray, rng, tries: int):
    p = e
    while True:
        pap = _span_basis([p @ m @ p for m in alg.mats])
        if len(pap) == 4:
            break
        q = _split_idempotent(alg, p, rng, tries)
        if q is None:
            raise NumericalError("could not find a primitive idempotent in a quaternionic block")
        p = q
    tp = np.trace(p)
    # pure quaternions: trace-orthogonal to p
    pure = [m - (np.trace(m @ p) / tp) * p for m in pap]
    pure = _span_basis(pure)
    units = []
    for m in pure:
        for v in units:
            m = m - (np.trace(m @ v) / np.trace(v @ v)) * v
        if np.abs(m).max() > 1e-9:
            units.append(m)
    units = [v / math.sqrt(-np.trace(v @ v) / tp) for v in units[:2]]
    i_, j_ = units
    return {"idempotent": p, "I": i_, "J": j_, "K": i_ @ j_}


def classify_commutant(
    algebra_basis: Sequence, tol: float = 1e-9, seed: int = 0, max_tries: int = 5
) -> ClassificationReport:
    """Decompose a real semisimple matrix algebra into blocks ``gl(n, D)``.

    Each simple block is found from a primitive central idempotent; its
    division algebra ``D`` is read off the block's centre (dimension 2 means
    ``C``) and, for centre ``R``, from the signature of the trace form
    ``tr(ab)``: ``+n`` for ``gl(n,R)`` and ``-n`` for ``gl(n/2,H)`` on a block
    of dimension ``n^2``.  Witnesses: ``J`` with ``J^2 = -e`` (complex
    blocks); an idempotent ``p`` and ``I, J`` with ``I^2 = J^2 = -p``,
    ``IJ = -JI`` (quaternionic blocks).
    """
    mats = []
    for m in algebra_basis:
        m = np.asarray(m)
        if np.iscomplexobj(m):
            if np.abs(m.imag).max() > tol:
                raise ValueError("classify_commutant works over the real numbers")
            m = m.real
        mats.append(np.asarray(m, dtype=float))
    if not mats:
        raise ValueError("empty algebra")
    n = mats[0].shape[0]
    dim = len(mats)
    flat = [m.ravel(order="F") for m in mats]
    sc = structure_constants(flat, matrix_product((n, n)), tol)
    alg = _Algebra(mats)
    _, unit_res = alg.coords(np.eye(n))
    if unit_res > tol:
        raise ValueError("the algebra does not contain the identity")

    gram = np.array([[np.trace(a @ b) for b in mats] for a in mats])
    w = np.linalg.eigvalsh(0.5 * (gram + gram.T))
    if np.abs(w).min() <= tol * np.abs(w).max():
        raise NonSemisimpleError(
            "trace form is degenerate: the algebra has a nonzero radical, which cannot happen "
            "for the fixed points of a compact group"
        )

    table = sc.table
    comm = np.vstack([(table[:, i, :] - table[i, :, :]).T for i in range(dim)])
    _, s, vh = np.linalg.svd(comm)
    zrank = int(np.sum(s > 1e-9 * s[0])) if s.size and s[0] > 0 else 0
    center = [alg.element(c) for c in vh[zrank:]]

    rng = np.random.default_rng(seed)
    idems = _central_idempotents(alg, center, rng, max_tries)
    blocks = []
    residual = sc.residual
    for e in idems:
        block = _span_basis([e @ m for m in mats])
        d_e = len(block)
        zdim = len(_span_basis([e @ z for z in center]))
        if zdim == 2:
            c = int(round(math.sqrt(d_e / 2)))
            zs = _span_basis([e @ z for z in center])
            zp = max(
                (z - (np.trace(z @ e) / np.trace(e)) * e for z in zs),
                key=lambda m: np.abs(m).max(),
            )
            bc = _Algebra([e, zp])
            (q, p_), _ = bc.coords(zp @ zp)
            # zp^2 = q e + p_ zp
            y = zp - 0.5 * p_ * e
            disc = q + 0.25 * p_ * p_
            jw = y / math.sqrt(-disc)
            residual = max(residual, float(np.abs(jw @ jw + e).max()))
            blocks.append(Block("C", c, d_e, e, {"J": jw}, _signature(block)))
            if 2 * c * c != d_e:
                raise NumericalError(f"complex block of dimension {d_e} is not 2c^2")
        elif zdim == 1:
            sig = _signature(block)
            root = int(round(math.sqrt(d_e)))
            if root * root != d_e:
                raise NumericalError(f"central simple block of dimension {d_e} is not a square")
            if sig == root:
                blocks.append(Block("R", root, d_e, e, {"idempotent": e}, sig))
            elif sig == -root and root % 2 == 0:
                wit = _quaternion_witness(alg, e, rng, max_tries)
                i_, j_, p = wit["I"], wit["J"], wit["idempotent"]
                residual = max(
                    residual,
                    float(np.abs(i_ @ i_ + p).max()),
                    float(np.abs(j_ @ j_ + p).max()),
                    float(np.abs(i_ @ j_ + j_ @ i_).max()),
                )
                blocks.append(Block("H", root // 2, d_e, e, wit, sig))
            else:
                raise NumericalError(f"trace-form signature {sig} fits no real division algebra")
        else:
            raise NumericalError(f"block centre of dimension {zdim}")
    total = sum(
        {"R": b.multiplicity**2, "C": 2 * b.multiplicity**2, "H": 4 * b.multiplicity**2}[
            b.division_type
        ]
        for b in blocks
    )
    if total != dim:
        raise NumericalError(f"block dimensions add up to {total}, algebra has dimension {dim}")
    blocks.sort(key=lambda b: (_TYPE_ORDER[b.division_type], b.multiplicity))
    return ClassificationReport(tuple(blocks), residual, dim)


# ---------------------------------------------------------------------------
# Invariant vector fields.


def _realvec(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex).ravel()
    return np.concatenate([m.real, m.imag])


def invariant_vector_fields(g_gens: Sequence, h_gens: Sequence, tol: float = 1e-10) -> list:
    """Basis of a complement of ``h`` in its normaliser ``{A in g : [A, h] in h}``.

    For a connected stabiliser this is the space of invariant vector fields
    on ``G/H``; for disconnected ``H`` the caller must also impose invariance
    under the component representatives.
    """
    g = [np.asarray(a) for a in g_gens]
    h = [np.asarray(b) for b in h_gens]
    if not g:
        return []
    gmat = np.column_stack([_realvec(a) for a in g])
    p = gmat.shape[1]
    if np.linalg.matrix_rank(gmat) < p:
        raise ValueError("g generators are linearly dependent")
    if not h:
        return list(g)
    hmat = np.column_stack([_realvec(b) for b in h])
    hcoef, *_ = np.linalg.lstsq(gmat, hmat, rcond=None)
    scale = max(1.0, float(np.abs(hmat).max()))
    if np.abs(gmat @ hcoef - hmat).max() > tol * scale * 10:
        raise ValueError("h is not contained in g")
    qh, rh = np.linalg.qr(hmat)
    qh = qh[:, np.abs(np.diag(rh)) > 1e-12 * scale]
    proj = np.eye(hmat.shape[0]) - qh @ qh.T
    for b1 in h:
        for b2 in h:
            if np.abs(proj @ _realvec(b1 @ b2 - b2 @ b1)).max() > tol * scale * 10:
                raise ValueError("h is not a subalgebra")
    stacked = np.vstack(
        [proj @ np.column_stack([_realvec(a @ b - b @ a) for a in g]) for b in h]
    )
    _, s, vh = np.linalg.svd(stacked)
    rank = int(np.sum(s > tol * s[0])) if s.size and s[0] > 0 else 0
    normaliser = vh[rank:]
    if normaliser.shape[0] == 0:
        return []
    # remove the h directions
    qc, rc = np.linalg.qr(hcoef)
    qc = qc[:, np.abs(np.diag(rc)) > 1e-12]
    reduced = normaliser - (normaliser @ qc) @ qc.T
    u, s2, vh2 = np.linalg.svd(reduced)
    keep = int(np.sum(s2 > 1e-8))
    if keep == 0:
        return []
    coeffs = echelon_form(vh2[:keep])
    return [sum(c * a for c, a in zip(row, g)) for row in coeffs]
