import numpy as np
import pytest

from enc_lab.entropy import EQ4, SEC2B, ModelError, conditional_entropy, entropic_chsh, evaluate
from enc_lab.quantum import (
    PSI1,
    PSI2,
    DensityOperator,
    StateError,
    bell_with_spectator,
    born_model,
    chsh_values,
    depolarize,
    fidelity,
    haar_random_state,
    joint_distribution,
    maximize_violation,
    mixed_family,
    chsh_angles,
    chsh_observables,
    pure_family,
    state_from_amplitudes,
    single_distribution,
    xz_observable,
)

from oracles import h2

RHO1 = DensityOperator.from_vector(PSI1)
RHO2 = DensityOperator.from_vector(PSI2)


def ket(bits):
    v = np.zeros(2 ** len(bits))
    v[int(bits, 2)] = 1.0
    return v


def proj(v):
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def test_pure_family_examples():
    assert np.allclose(pure_family(1, 0).matrix, proj(ket("001") + ket("111")))
    assert np.allclose(pure_family(0, 1).matrix, proj(ket("010") + ket("111")))
    v = 0.5 * ket("001") + 0.5 * ket("010") + ket("111")
    assert np.allclose(pure_family(0.5, 0.5).matrix, proj(v))
    assert pure_family(0.3, 0.9).rank() == 1
    with pytest.raises(StateError):
        pure_family(0, 0)


def test_mixed_family_examples():
    assert np.allclose(mixed_family(1).matrix, pure_family(1, 0).matrix)
    assert np.allclose(mixed_family(0).matrix, pure_family(0, 1).matrix)
    rho = mixed_family(0.5)
    assert rho.rank() == 2
    # Gram-matrix oracle: nonzero spectrum of (|a><a| + |b><b|)/2
    psi1 = (ket("001") + ket("111")) / np.sqrt(2)
    psi2 = (ket("010") + ket("111")) / np.sqrt(2)
    gram = 0.5 * np.array([[1, psi1 @ psi2], [psi2 @ psi1, 1]])
    expected = sorted(np.linalg.eigvalsh(gram))
    assert np.allclose(expected, [0.25, 0.75])
    got = sorted(e for e in rho.eigenvalues() if e > 1e-12)
    assert np.allclose(got, expected, atol=1e-12)
    for p in (-0.1, 1.1):
        with pytest.raises(StateError):
            mixed_family(p)


def test_density_operator_validation():
    with pytest.raises(StateError):
        DensityOperator(np.eye(3) / 3)
    with pytest.raises(StateError):
        DensityOperator(np.diag([0.6, 0.6]))
    with pytest.raises(StateError):
        DensityOperator(np.diag([1.2, -0.2]))
    with pytest.raises(StateError):
        DensityOperator(np.array([[0.5, 0.5], [0.0, 0.5]]))


@pytest.mark.parametrize("alpha", [0.0, 0.6093, np.pi, 1.3])
def test_observables(alpha):
    o = xz_observable(alpha, 0)
    expected = np.cos(alpha) * np.array([[1, 0], [0, -1]]) + np.sin(alpha) * np.array([[0, 1], [1, 0]])
    assert np.allclose(o.operator(), expected)
    p = o.projector(1)
    assert np.allclose(p @ p, p)
    assert np.allclose(p + o.projector(-1), np.eye(2))


def test_projector_coefficients():
    assert np.allclose(xz_observable(0, 0).projector(1), [[1, 0], [0, 0]])
    assert np.allclose(xz_observable(np.pi, 0).projector(1), [[0, 0], [0, 1]])
    p = xz_observable(0.6093, 0).projector(1)
    assert 2 * p[0, 0].real - 1 == pytest.approx(0.820, abs=1e-3)
    assert 2 * p[0, 1].real == pytest.approx(0.573, abs=1e-3)


def test_chsh_angles():
    a = chsh_angles(0.457)
    assert [a[k] for k in ("A0", "B1", "A1", "B0")] == pytest.approx([0, 0.3047, 0.6093, 0.9140], abs=1e-4)
    assert a["E0"] == a["B0"] and a["E1"] == a["B1"]
    assert set(chsh_angles(0.0).values()) == {0.0}


def test_equal_angles_agree_perfectly():
    rho = bell_with_spectator()
    j = joint_distribution(rho, xz_observable(0.7, 0), xz_observable(0.7, 1))
    assert np.allclose(j.probabilities, [[0.5, 0], [0, 0.5]], atol=1e-12)


@pytest.mark.parametrize("a, b", [(0.0, 0.3), (0.2, 1.4), (1.0, -0.5), (0.3, 2.9)])
def test_agreement_closed_form(a, b):
    rho = bell_with_spectator()
    j = joint_distribution(rho, xz_observable(a, 0), xz_observable(b, 1)).probabilities
    agree = j[0, 0] + j[1, 1]
    assert agree == pytest.approx((1 + np.cos(a - b)) / 2, abs=1e-12)
    # brute force: explicit kron with the spectator in |1>
    full = np.kron(np.kron(xz_observable(a, 0).projector(1), xz_observable(b, 1).projector(1)), np.eye(2))
    assert j[0, 0] == pytest.approx(np.trace(rho.matrix @ full).real, abs=1e-12)


def test_separable_cut_gives_product():
    rho = pure_family(1, 0)
    a1, e0 = xz_observable(0.6, 0), xz_observable(0.9, 2)
    j = joint_distribution(rho, a1, e0).probabilities
    assert np.allclose(j, np.outer(single_distribution(rho, a1), single_distribution(rho, e0)), atol=1e-12)


def test_same_site_pair_rejected():
    with pytest.raises(ValueError):
        joint_distribution(RHO1, xz_observable(0, 1), xz_observable(1, 1))
    model = born_model(RHO1, {"a": xz_observable(0, 0), "b": xz_observable(1, 0)})
    with pytest.raises(ModelError, match="a"):
        model.joint("a", "b")


def test_born_model_bell_violation():
    model = born_model(bell_with_spectator(), chsh_observables(0.457))
    value = evaluate(entropic_chsh("A0", "A1", "B0", "B1"), model)
    assert value == pytest.approx(0.237, abs=1e-3)
    # closed form from the agreement probabilities along the chain
    s = 2 * 0.457 / 3
    oracle = h2((1 + np.cos(3 * s)) / 2) - 3 * h2((1 + np.cos(s)) / 2)
    assert value == pytest.approx(oracle, abs=1e-12)


def test_maximally_mixed_is_uniform():
    rho = DensityOperator.maximally_mixed(3)
    model = born_model(rho, chsh_observables(0.457))
    assert conditional_entropy(model.joint("A0", "B1")) == pytest.approx(1.0)
    assert chsh_values(rho, 0.8) == pytest.approx((-2.0, -2.0))


def test_marginals_of_mixed_family():
    rho = mixed_family(0.3)
    assert np.allclose(np.trace(rho.reduced([0, 2])), 1.0)
    assert np.allclose(rho.reduced([0, 1, 2]), rho.matrix)
    # qubit 0 of both branches is maximally mixed
    assert np.allclose(rho.reduced([0]), np.eye(2) / 2)


def test_fidelity():
    assert fidelity(RHO1, RHO1) == pytest.approx(1.0)
    zero, one = DensityOperator(np.diag([1.0, 0])), DensityOperator(np.diag([0, 1.0]))
    assert fidelity(zero, one) == pytest.approx(0.0, abs=1e-12)
    assert fidelity(RHO1, mixed_family(0.5)) == pytest.approx(0.625, abs=1e-9)
    # <psi1|rho|psi1> = p + (1-p)/4
    assert fidelity(RHO1, mixed_family(0.85)) == pytest.approx(0.85 + 0.15 / 4, abs=1e-9)
    with pytest.raises(StateError):
        fidelity(zero, RHO1)


def test_fidelity_is_symmetric(rng):
    for _ in range(10):
        a = depolarize(haar_random_state(rng, 2), 0.3)
        b = depolarize(haar_random_state(rng, 2), 0.6)
        assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-9)
        assert 0 <= fidelity(a, b) <= 1 + 1e-12


def test_depolarize():
    assert np.allclose(depolarize(RHO1, 0).matrix, RHO1.matrix)
    assert np.allclose(depolarize(RHO1, 1).matrix, np.eye(8) / 8)
    with pytest.raises(StateError):
        depolarize(RHO1, 1.5)


def test_mirror_symmetry_on_grid():
    for p1 in np.linspace(0, 1, 21):
        for p2 in np.linspace(0, 1, 21):
            if p1 == p2 == 0:
                continue
            k1, k2 = chsh_values(pure_family(p1, p2), 0.457)
            m1, m2 = chsh_values(pure_family(p2, p1), 0.457)
            assert k1 == pytest.approx(m2, abs=1e-12)
            assert k1 + k2 <= 1e-9


def test_haar_states_are_states(rng):
    for n in (1, 2, 3):
        rho = haar_random_state(rng, n)
        assert rho.rank() == 1
        assert np.trace(rho.matrix).real == pytest.approx(1.0)


def test_maximize_against_grid_oracle():
    theta, value = maximize_violation(RHO1)
    grid = np.arange(0.05, 1.5, 1e-4)
    s = 2 * grid / 3
    curve = np.array([h2((1 + np.cos(3 * x)) / 2) - 3 * h2((1 + np.cos(x)) / 2) for x in s])
    k = int(curve.argmax())
    assert value == pytest.approx(curve[k], abs=1e-6)
    assert value >= curve[k] - 1e-9
    assert theta == pytest.approx(grid[k], abs=1e-3)
    assert value == pytest.approx(0.2370, abs=5e-4)
    assert theta == pytest.approx(0.457, abs=8e-3)


def test_maximize_forms_agree():
    t1, v1 = maximize_violation(RHO1, SEC2B)
    t2, v2 = maximize_violation(RHO1, EQ4)
    assert v1 == pytest.approx(v2, abs=1e-9)
    assert t1 == pytest.approx(t2, abs=1e-4)


def test_noncontextual_states():
    zero = DensityOperator.from_vector([1, 0, 0, 0, 0, 0, 0, 0])
    assert maximize_violation(zero)[1] <= 0
    mm = DensityOperator.maximally_mixed(3)
    for theta in np.linspace(0.05, 1.5, 15):
        assert chsh_values(mm, theta)[0] == pytest.approx(-2.0, abs=1e-12)


def test_psi2_mirrors_psi1():
    assert chsh_values(RHO2, 0.457)[1] == pytest.approx(chsh_values(RHO1, 0.457)[0], abs=1e-12)


def test_state_from_amplitudes():
    amps = [[0, 0]] * 8
    amps[1] = amps[7] = [1, 0]
    assert np.allclose(state_from_amplitudes({"amplitudes": amps}).matrix, RHO1.matrix)
    with pytest.raises(StateError):
        state_from_amplitudes({"amps": []})
