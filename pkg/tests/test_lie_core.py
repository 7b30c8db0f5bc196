import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from equimaps import lie_core as lc


GROUPS = [lc.so_group(2), lc.so_group(3), lc.su2_group(), lc.sl2r_group(), lc.sl2c_group(),
          lc.se_group(2), lc.so11_group()]


def reps_for(group):
    out = [lc.trivial_rep(group), lc.defining_rep(group),
           lc.endo_conjugation_rep(lc.defining_rep(group)),
           lc.tensor_rep(lc.defining_rep(group), lc.dual_rep(lc.defining_rep(group))),
           lc.det_twist(lc.defining_rep(group), 2)]
    if group.ambient_size == 2:
        out.append(lc.su2_polynomial_rep(3, group))
        out.append(lc.realify(lc.su2_polynomial_rep(2, group)))
    return out


@pytest.mark.parametrize("group", GROUPS, ids=lambda g: g.name)
def test_homomorphism_and_derivative(group):
    rng = np.random.default_rng(3)
    for rep in reps_for(group):
        assert lc.homomorphism_residual(rep, rng) < 1e-10, rep.provenance
        assert lc.derivative_residual(rep, rng) < 1e-6, rep.provenance


def test_expm_of_rotation_generator():
    a = np.array([[0.0, -1.0], [1.0, 0.0]])
    g = lc.expm(np.pi / 2 * a)
    assert np.allclose(g, [[0, -1], [1, 0]], atol=1e-15)


def test_as_mat_rejects_nonfinite():
    with pytest.raises(ValueError):
        lc.as_mat(np.array([[np.nan]]))


def test_group_shape_validation():
    with pytest.raises(ValueError):
        lc.LieGroupSpec("bad", 2, (np.zeros((3, 3)),))


def test_sl2c_is_six_dimensional_and_complex():
    g = lc.sl2c_group()
    assert g.dimension == 6
    assert g.field == lc.COMPLEX
    assert lc.sl2r_group().field == lc.REAL


def test_endo_conj_is_conjugation_column_major():
    group = lc.so_group(3)
    rep = lc.endo_conjugation_rep(lc.defining_rep(group))
    rng = np.random.default_rng(0)
    g = lc.random_group_element(group, rng)
    m = rng.normal(size=(3, 3))
    out = rep.group_eval(g) @ m.ravel(order="F")
    assert np.allclose(out.reshape(3, 3, order="F"), g @ m @ np.linalg.inv(g))
    assert rep.matrix_shape == (3, 3)


def test_realify_block_convention():
    m = np.array([[1 + 2j]])
    assert np.array_equal(lc.realify_matrix(m), [[1.0, 2.0], [-2.0, 1.0]])


def test_realify_defining_su2_matches_displayed_rule():
    a, b, c, d = 0.3, -0.5, 0.7, 0.1
    g = np.array([[a + b * 1j, -c + d * 1j], [c + d * 1j, a - b * 1j]])
    want = np.array([[a, b, -c, d], [-b, a, -d, -c], [c, d, a, -b], [-d, c, b, a]])
    rep = lc.realify(lc.defining_rep(lc.su2_group()))
    assert np.allclose(rep.group_eval(g), want, atol=1e-15)


def test_realify_needs_complex():
    with pytest.raises(ValueError):
        lc.realify(lc.defining_rep(lc.so_group(3)))


def test_polynomial_rep_acts_by_substitution():
    # (g.p)(x, y) = p(g^-1 (x, y)); check on p = x^2 y at a sample point
    rep = lc.su2_polynomial_rep(3)
    rng = np.random.default_rng(1)
    g = lc.random_group_element(rep.group, rng)
    coeffs = np.zeros(4, dtype=complex)
    coeffs[1] = 1.0  # x^2 y
    new = rep.group_eval(g) @ coeffs
    x, y = 0.4 - 0.2j, 1.1 + 0.3j
    u, v = np.linalg.inv(g) @ np.array([x, y])
    assert np.isclose(sum(c * x ** (3 - k) * y**k for k, c in enumerate(new)), u**2 * v)


def test_parity():
    g = lc.su2_group()
    assert lc.su2_polynomial_rep(2).is_even()
    assert not lc.su2_polynomial_rep(1).is_even()
    assert lc.endo_conjugation_rep(lc.defining_rep(g)).is_even()


def test_direct_sum_dims():
    g = lc.so_group(3)
    r = lc.direct_sum(lc.trivial_rep(g), lc.defining_rep(g), lc.defining_rep(g))
    assert r.dim == 7
    assert lc.homomorphism_residual(r, np.random.default_rng(0)) < 1e-12


def test_mixed_group_rejected():
    with pytest.raises(ValueError):
        lc.tensor_rep(lc.defining_rep(lc.so_group(3)), lc.defining_rep(lc.so_group(2)))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 5), st.integers(0, 2**31 - 1))
def test_polynomial_rep_homomorphism_property(n, seed):
    rep = lc.su2_polynomial_rep(n, lc.sl2c_group())
    assert lc.homomorphism_residual(rep, np.random.default_rng(seed), samples=3) < 1e-9
