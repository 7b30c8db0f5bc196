"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -s`` (or ``python tests/test_acceptance.py``)
to see the lines.
"""
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
from numpy.polynomial import polynomial as P

sys.path.insert(0, str(Path(__file__).resolve().parent))

from equimaps import lie_core as lc  # noqa: E402
from equimaps.algebra import (  # noqa: E402
    classify_commutant,
    cyclic_nilpotent_certificate,
    invariant_vector_fields,
    matrix_product,
    pointwise_structure_match,
    structure_constants,
)
from equimaps.cli import parse_rep  # noqa: E402
from equimaps.invariants import algebra_fixed_space, full_fixed_space, haar_projector_rank  # noqa: E402
from equimaps.kernels import (  # noqa: E402
    RadialProfileSet,
    build_basis,
    check_equivariance,
    check_kernel_constraint,
    evaluate,
    hom_rep_with_det_twist,
    rd_kernel,
)
from equimaps.sections import (  # noqa: E402
    INFINITY,
    catalog,
    get_space,
    h3_section,
    sphere_section,
    sphere_space,
    weyl_matrix,
)

from golden import GOLDEN_PAIRS  # noqa: E402


def report(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    sys.__stdout__.write("\n" + line + "\n")
    sys.__stdout__.flush()
    assert ok, line


def basis_for(geometry, expr):
    space = get_space(geometry)
    return build_basis(space, parse_rep(expr, space.group))


def test_criterion_01_upper_half_plane():
    b = basis_for("h2", "endo_conj(defining)")
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(50):
        x, y = rng.uniform(-3, 3), rng.uniform(0.2, 5)
        want = np.array([[x / y, -(x * x + y * y) / y], [1 / y, -x / y]])
        worst = max(worst, float(np.abs(evaluate(b, complex(x, y), 1) - want).max()))
    sc = structure_constants(b.invariant_vectors, matrix_product((2, 2)))
    v2 = b.invariant_vectors[1].reshape(2, 2, order="F")
    square = float(np.abs(v2 @ v2 + np.eye(2)).max())
    table_ok = np.abs(sc.table[1, 1] - [-1, 0]).max() <= 1e-12
    ok = b.m == 2 and worst <= 1e-12 and square <= 1e-12 and table_ok
    report(1, ok, f"H^2 conjugation: m={b.m}, kernel error {worst:.2e}, |v2^2+Id| {square:.1e}")


def _display_coefficients(m, z, power):
    # (x - z y)^m (conj(z) x + y)^m as a polynomial in t = y/x, divided by (1+|z|^2)^power
    a = P.polypow([1.0, -z], m)
    b = P.polypow([np.conj(z), 1.0], m)
    c = P.polymul(a, b) if m else np.array([1.0 + 0j])
    c = np.pad(c, (0, 2 * m + 1 - len(c)))
    return c / (1 + abs(z) ** 2) ** power


def test_criterion_02_riemann_sphere():
    rng = np.random.default_rng(202)
    worst, literal_worst, exact_inf, dims = 0.0, 0.0, True, []
    for m in range(5):
        b = basis_for("riemann-sphere", f"su2_poly({2 * m})")
        dims.append(b.m)
        for _ in range(20):
            z = complex(*rng.normal(size=2))
            got = evaluate(b, z, 0)
            worst = max(worst, float(np.abs(got - _display_coefficients(m, z, m)).max()))
            # the display with a single power of (1+|z|^2) differs by (1+|z|^2)^(m-1)
            literal = _display_coefficients(m, z, 1)
            scale = (1 + abs(z) ** 2) ** (m - 1)
            literal_worst = max(literal_worst, float(np.abs(got * scale - literal).max()))
        want = np.zeros(2 * m + 1)
        want[m] = (-1) ** m
        exact_inf &= bool(np.array_equal(evaluate(b, INFINITY, 0), want))
    ok = dims == [1] * 5 and worst <= 1e-10 and literal_worst <= 1e-9 and exact_inf
    report(2, ok, f"Riemann sphere V_2m, m=0..4: dims {dims}, coefficient error {worst:.1e}, "
                  f"value at infinity exact={exact_inf}")


def test_criterion_03_sphere_sections():
    rng = np.random.default_rng(303)
    worst = {"orth": 0.0, "det": 0.0, "col": 0.0}
    bitwise = True
    for n in range(1, 7):
        for _ in range(1000):
            x = rng.normal(size=n + 1)
            f = sphere_section(x)
            r = np.linalg.norm(x)
            worst["orth"] = max(worst["orth"], float(np.abs(f.T @ f - np.eye(n + 1)).max()))
            worst["det"] = max(worst["det"], abs(np.linalg.det(f) - 1))
            worst["col"] = max(worst["col"], float(np.abs(f[:, 0] * r - x).max()))
            for lam in (0.5, 2.0):
                bitwise &= bool(np.array_equal(sphere_section(lam * x), f))
    degenerate = True
    for n in range(3, 7):
        x = rng.normal(size=n + 1)
        x[-2:] = 0.0
        want = np.eye(n + 1)
        want[: n - 1, : n - 1] = sphere_section(x[: n - 1])
        degenerate &= bool(np.array_equal(sphere_section(x), want))
    ok = max(worst.values()) <= 1e-12 and bitwise and degenerate
    report(3, ok, f"f_n, n=1..6: max errors {', '.join(f'{k} {v:.1e}' for k, v in worst.items())}; "
                  f"scale-invariant={bitwise}, degenerate branch={degenerate}")


def test_criterion_04_quaternions():
    rep = lc.realify(lc.defining_rep(lc.su2_group()))
    fs = algebra_fixed_space(lc.endo_conjugation_rep(rep), rep.group.algebra_generators)
    eye, i, j, k = [v.reshape(4, 4, order="F") for v in fs.echelon]
    rel = max(float(np.abs(q + np.eye(4)).max()) for q in (i @ i, j @ j, k @ k, i @ j @ k))
    summary = classify_commutant([eye, i, j, k]).summary()
    ok = fs.dim == 4 and rel <= 1e-12 and summary == [("H", 1)] and np.abs(eye - np.eye(4)).max() <= 1e-12
    report(4, ok, f"commutant of U: dim {fs.dim}, quaternion relations {rel:.1e}, blocks {summary}")


def test_criterion_05_hyperbolic_space():
    space = get_space("h3")
    rng = np.random.default_rng(505)
    pts = space.sample_points(rng, 1000)
    weyl = max(float(np.abs(h3_section(p) @ h3_section(p).conj().T - weyl_matrix(p)).max())
               for p in pts)
    b = basis_for("h3", "endo_conj(realify(defining))")
    rho_u = lc.realify(lc.defining_rep(space.group))
    prod = matrix_product((4, 4))
    i_const = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
    disp = kern = table = 0.0
    for p in pts[:200]:
        t, x, y, z = space.normalize_point(p)
        c = 1 / (math.sqrt(2) * math.sqrt(t + 1))
        want_rho = c * np.array([[t + 1 + z, 0, x, -y], [0, t + 1 + z, y, x],
                                 [x, y, t + 1 - z, 0], [-y, x, 0, t + 1 - z]])
        disp = max(disp, float(np.abs(rho_u.group_eval(h3_section(p)) - want_rho).max()))
        jj = np.array([[x, y, -t - z, 0], [y, -x, 0, t + z], [t - z, 0, -x, y], [0, -t + z, y, x]])
        kk = np.array([[-y, x, 0, -t - z], [x, y, -t - z, 0], [0, t - z, -y, -x], [t - z, 0, -x, y]])
        ks = b.evaluate_all(p)
        kern = max(kern, float(max(np.abs(ks[1] - i_const).max(), np.abs(ks[2] - jj).max(),
                                   np.abs(ks[3] - kk).max())))
        table = max(table, pointwise_structure_match(b, prod, p))
    ok = weyl <= 1e-10 and disp <= 1e-12 and kern <= 1e-10 and table <= 1e-9
    report(5, ok, f"H^3: gg*=A {weyl:.1e}, rho_U display {disp:.1e}, kernels I,J,K {kern:.1e}, "
                  f"pointwise table {table:.1e}")


def test_criterion_06_nilpotent_algebra():
    b = basis_for("c2-punctured", "endo_conj(defining)")
    rng = np.random.default_rng(606)
    worst = 0.0
    for v in b.space.sample_points(rng, 50):
        x, y = v
        want = np.array([[-x * y, x * x], [-y * y, x * y]])
        worst = max(worst, float(np.abs(evaluate(b, v, 1) - want).max()))
    group = lc.sl2c_group()
    e = np.array([[0, 1], [0, 0]], dtype=complex)
    dims, certs = [], []
    for n in range(1, 5):
        vn = lc.su2_polynomial_rep(n, group)
        fs = algebra_fixed_space(lc.endo_conjugation_rep(vn), [e, 1j * e])
        dims.append(fs.dim)
        certs.append(cyclic_nilpotent_certificate(vn.algebra_eval(e), n).passed)
    ok = worst <= 1e-12 and dims == [2, 3, 4, 5] and all(certs)
    report(6, ok, f"C^2 minus cone: kernel error {worst:.1e}; dim gl(V_n)^A for n=1..4 = {dims}, "
                  f"certificates {certs}")


def test_criterion_07_equivariance_suite():
    results = {}
    for geometry, expr in GOLDEN_PAIRS:
        results[(geometry, expr)] = check_equivariance(
            basis_for(geometry, expr), point_samples=100, group_samples=100, seed=707
        )
    worst_pair = max(results, key=results.get)
    ok = all(v <= 1e-8 for v in results.values())
    report(7, ok, f"{len(results)} golden pairs, 100x100 samples; worst {results[worst_pair]:.1e} "
                  f"at {worst_pair[0]} / {worst_pair[1]}")


def test_criterion_08_radial_extension():
    space = get_space("sphere(2)")
    d = lc.defining_rep(space.group)
    b = build_basis(space, hom_rep_with_det_twist(d, d))
    profiles = RadialProfileSet(
        [math.cos, lambda r: r * r * math.exp(-r), lambda r: math.sin(r) ** 2], b.invariant_count_full_group
    )
    k = rd_kernel(b, profiles)
    x = np.array([2.0**-20, 2.0**-20, 0.0])
    limit = float(np.abs(k(x) - k(np.zeros(3))).max())
    try:
        RadialProfileSet([math.cos, math.cos, math.sin], b.invariant_count_full_group)
        rejected = False
    except ValueError:
        rejected = True
    constraint = check_kernel_constraint(k, d, d, space.group, samples=200, seed=808)
    ok = limit <= 1e-8 and rejected and constraint <= 1e-8
    report(8, ok, f"R^3 Hom kernel: limit deviation {limit:.1e}, bad profile rejected={rejected}, "
                  f"kernel constraint {constraint:.1e}")


def _oracle_reps(space):
    g = space.group
    if g.ambient_size == 2 and g.field == lc.COMPLEX:
        return [lc.trivial_rep(g), lc.su2_polynomial_rep(2, g), lc.su2_polynomial_rep(4, g),
                lc.endo_conjugation_rep(lc.realify(lc.defining_rep(g)))]
    return [lc.trivial_rep(g), lc.defining_rep(g), lc.endo_conjugation_rep(lc.defining_rep(g))]


def test_criterion_09_oracles():
    mismatches, checked = [], 0
    spaces = catalog() + [sphere_space(1), sphere_space(3), get_space("euclidean(3)")]
    for space in spaces:
        if not space.stabilizer_is_compact:
            continue
        for rep in _oracle_reps(space):
            if space.projective and not rep.is_even():
                continue
            alg = full_fixed_space(rep, space.stabilizer_generators, space.stabilizer_components).dim
            haar = haar_projector_rank(rep, space.stabilizer_chart, quadrature_points=12)
            checked += 1
            if alg != haar:
                mismatches.append((space.key, rep.provenance, alg, haar))
    so2_in_so3 = invariant_vector_fields(lc.so_algebra(3), lc.so_algebra(2, offset=1, size=3))
    so2_in_sl2 = invariant_vector_fields(lc.sl2r_group().algebra_generators,
                                         [np.array([[0.0, -1.0], [1.0, 0.0]])])
    whole = invariant_vector_fields(lc.so_algebra(3), [])
    ok = not mismatches and not so2_in_so3 and not so2_in_sl2 and len(whole) == 3
    report(9, ok, f"{checked} fixed-space dims match Haar ranks (mismatches {mismatches}); "
                  f"tangent dims so(3)/so(2)={len(so2_in_so3)}, sl(2,R)/so(2)={len(so2_in_sl2)}, "
                  f"so(3)/0={len(whole)}")


def test_criterion_10_cli_determinism():
    argv = [sys.executable, "-m", "equimaps.cli", "basis", "--geometry", "h3",
            "--rep", "endo_conj(realify(defining))", "--sample", "8", "--seed", "42"]
    runs = [subprocess.run(argv, capture_output=True, check=False) for _ in range(2)]
    same = runs[0].stdout == runs[1].stdout and len(runs[0].stdout) > 0
    ok = same and all(r.returncode == 0 for r in runs)
    report(10, ok, f"two CLI runs, {len(runs[0].stdout)} bytes each, byte-identical={same}")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
