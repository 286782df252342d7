import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unified_qme.bath import drude_lorentz_high_temp
from unified_qme.linalg import InvariantError
from unified_qme.scenarios import two_qubit_coupling, two_qubit_hamiltonian
from unified_qme.spectral import (
    IncompatibleReferenceError,
    aggregate_jump_operators,
    bohr_frequencies,
    cluster_operator_direct,
    decompose,
    jump_operators,
    reference_split_by_tolerance,
    reference_split_explicit,
    validity_diagnostics,
)
from unified_qme.units import rate_from_lifetime_fs

from conftest import SX, SZ, random_hermitian

R = np.sqrt(100.0**2 + 2.0**2)


def ket(bits):
    v = np.zeros(4, complex)
    v[int(bits, 2)] = 1.0
    return v


def eigenprojectors(E12=100.0, J=2.0):
    """P_00, P_01, P_10, P_11 from the closed-form eigenvectors (E1 = E2)."""
    th = 0.5 * np.arctan(J / E12)
    ph = np.pi / 4
    e = {
        "11": np.cos(th) * ket("11") + np.sin(th) * ket("00"),
        "00": np.cos(th) * ket("00") - np.sin(th) * ket("11"),
        "10": np.cos(ph) * ket("10") + np.sin(ph) * ket("01"),
        "01": np.cos(ph) * ket("01") - np.sin(ph) * ket("10"),
    }
    return {k: np.outer(v, v.conj()) for k, v in e.items()}


def test_decompose_examples():
    assert np.allclose(decompose(SZ).energies, [-1, 1])
    d = decompose(two_qubit_hamiltonian(50, 50, 2))
    assert np.allclose(d.energies, [-R, -2, 2, R], atol=1e-12)
    d0 = decompose(two_qubit_hamiltonian(50, 50, 0))
    assert np.allclose(d0.energies, [-100, 0, 100])
    assert np.trace(d0.projectors[1]).real == pytest.approx(2.0)


def test_closed_form_eigenprojectors():
    d = decompose(two_qubit_hamiltonian(50, 50, 2))
    P = eigenprojectors()
    for key, p in zip(["00", "01", "10", "11"], d.projectors):
        assert np.allclose(p, P[key], atol=1e-12)


def test_bohr_frequencies_examples():
    assert np.allclose(bohr_frequencies(decompose(SZ)).frequencies, [-2, 0, 2])
    F = bohr_frequencies(decompose(two_qubit_hamiltonian(50, 50, 2)))
    expected = sorted([0, 4, -4, R - 2, -(R - 2), R + 2, -(R + 2), 2 * R, -2 * R])
    assert np.allclose(F.frequencies, expected, atol=1e-10)
    assert np.allclose(sorted([98.02, 102.02, 200.04]), [R - 2, R + 2, 2 * R], atol=1e-3)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_bohr_closed_under_negation(seed, d):
    F = bohr_frequencies(decompose(random_hermitian(np.random.default_rng(seed), d)))
    assert np.allclose(np.sort(-F.frequencies), F.frequencies, atol=1e-12)
    assert np.any(np.abs(F.frequencies) < 1e-12)


def test_jump_operators_qubit():
    j = jump_operators(decompose(SZ), bohr_frequencies(decompose(SZ)), [SX])
    F = j.bohr
    assert np.allclose(j.ops[0][F.index_of(2.0)], [[0, 1], [0, 0]])
    assert np.allclose(j.ops[0][F.index_of(-2.0)], [[0, 0], [1, 0]])
    assert np.allclose(j.ops[0][F.index_of(0.0)], 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_jump_operator_invariants(seed):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, 4)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))  # non-Hermitian allowed
    herm = random_hermitian(rng, 4)
    d = decompose(h)
    F = bohr_frequencies(d)
    j = jump_operators(d, F, [a, herm])
    for alpha, ops in enumerate(j.ops):
        assert np.allclose(sum(ops), [a, herm][alpha], atol=1e-12)
        for w, op in zip(F.frequencies, ops):
            assert np.allclose(h @ op - op @ h, -w * op, atol=1e-10)
    for k, w in enumerate(F.frequencies):
        assert np.allclose(j.ops[1][F.index_of(-w)], j.ops[1][k].conj().T, atol=1e-12)


def test_two_qubit_closed_form_operators():
    h = two_qubit_hamiltonian(50, 50, 2)
    d = decompose(h)
    P = eigenprojectors()
    split = reference_split_by_tolerance(d, 10.0)
    sx1 = two_qubit_coupling(1, 1, 0)
    sz1 = two_qubit_coupling(1, 0, 1)
    for kx, kz in [(1.0, 0.0), (0.0, 1.0), (0.7, -0.3)]:
        a = two_qubit_coupling(1, kx, kz)
        j = aggregate_jump_operators(jump_operators(d, split.bohr, [a]), split)
        F = split.bohr
        ops = j.ops[0]
        a_w1 = kx * (P["00"] @ sx1 @ P["10"] + P["01"] @ sx1 @ P["11"])
        a_w2 = kx * (P["00"] @ sx1 @ P["01"] + P["10"] @ sx1 @ P["11"])
        a_w12 = kz * P["00"] @ sz1 @ P["11"]
        assert np.allclose(ops[F.index_of(R + 2)], a_w1, atol=1e-12)
        assert np.allclose(ops[F.index_of(R - 2)], a_w2, atol=1e-12)
        assert np.allclose(ops[F.index_of(2 * R)], a_w12, atol=1e-12)
        assert np.allclose(ops[F.index_of(4.0)], P["01"] @ a @ P["10"], atol=1e-12)
        assert np.allclose(ops[F.index_of(0.0)], sum(P[k] @ a @ P[k] for k in P), atol=1e-12)
        p0 = P["01"] + P["10"]
        bar_w = kx * (P["00"] @ sx1 @ p0 + p0 @ sx1 @ P["11"])
        bar_0 = kz * (p0 @ sz1 @ p0 + P["00"] @ sz1 @ P["00"] + P["11"] @ sz1 @ P["11"])
        c_w = int(np.argmin(np.abs(split.centers - R)))
        c_0 = int(np.argmin(np.abs(split.centers)))
        assert np.allclose(j.cluster_ops[0][c_w], bar_w, atol=1e-12)
        assert np.allclose(j.cluster_ops[0][c_0], bar_0, atol=1e-12)
        assert np.allclose(j.cluster_ops[0][c_w], ops[F.index_of(R + 2)] + ops[F.index_of(R - 2)], atol=1e-12)
        assert np.allclose(j.cluster_ops[0][c_0], ops[F.index_of(0.0)] + ops[F.index_of(4.0)]
                           + ops[F.index_of(-4.0)], atol=1e-12)


def test_split_by_tolerance_two_qubit():
    d = decompose(two_qubit_hamiltonian(50, 50, 2))
    split = reference_split_by_tolerance(d, 10.0)
    assert np.allclose([lv.energy for lv in split.h0_levels], [-R, 0, R], atol=1e-12)
    assert len(split.clusters) == 5
    assert np.allclose(split.centers, [-2 * R, -R, 0, R, 2 * R], atol=1e-12)
    members = {round(c.center, 6): sorted(round(split.bohr.frequencies[k], 6) for k in c.members)
               for c in split.clusters}
    assert members[round(R, 6)] == [round(R - 2, 6), round(R + 2, 6)]
    assert members[0.0] == [-4.0, 0.0, 4.0]
    assert members[round(2 * R, 6)] == [round(2 * R, 6)]
    # centre of the +w cluster is the mean of its two members
    assert split.centers[3] == pytest.approx(((R - 2) + (R + 2)) / 2)
    h0, delta = split.h0, split.delta
    assert np.allclose(h0 @ delta, delta @ h0, atol=1e-10)
    assert np.allclose(h0 + delta, d.matrix, atol=1e-10)
    # H0 from the closed form
    P = eigenprojectors()
    assert np.allclose(h0, R * (P["11"] - P["00"]), atol=1e-10)


def test_cluster_partition_and_centres():
    d = decompose(two_qubit_hamiltonian(50, 50, 2))
    split = reference_split_by_tolerance(d, 10.0)
    seen = sorted(k for c in split.clusters for k in c.members)
    assert seen == list(range(len(split.bohr)))
    assert np.allclose(np.sort(-split.centers), split.centers)
    h0_freqs = bohr_frequencies(decompose(split.h0)).frequencies
    assert np.allclose(np.sort(split.centers), h0_freqs, atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_small_tolerance_gives_trivial_split(seed):
    d = decompose(random_hermitian(np.random.default_rng(seed), 4))
    gap = float(np.min(np.diff(d.energies)))
    split = reference_split_by_tolerance(d, 0.5 * gap)
    assert split.is_trivial
    assert np.allclose(split.delta, 0, atol=1e-10)
    assert all(len(c.members) == 1 for c in split.clusters)


def test_split_tolerance_zero_is_trivial():
    d = decompose(two_qubit_hamiltonian(50, 50, 2))
    split = reference_split_by_tolerance(d, 0.0)
    assert split.is_trivial
    assert np.allclose(split.h0, d.matrix, atol=1e-12)
    assert len(split.clusters) == len(split.bohr)


def test_split_merging_everything_is_flagged():
    d = decompose(two_qubit_hamiltonian(50, 50, 2))
    split = reference_split_by_tolerance(d, 500.0)
    assert len(split.h0_levels) == 1
    assert "single_reference_level" in split.diagnostics["flags"]


def test_split_rejects_negative_tolerance():
    with pytest.raises(ValueError):
        reference_split_by_tolerance(decompose(SZ), -1.0)


def test_explicit_split_examples():
    h = two_qubit_hamiltonian(50, 50, 2)
    d = decompose(h)
    assert reference_split_explicit(d, h).is_trivial
    zero = reference_split_explicit(d, np.zeros((4, 4)))
    assert len(zero.clusters) == 1
    assert zero.centers[0] == 0.0
    assert sorted(zero.clusters[0].members) == list(range(len(zero.bohr)))
    # dimer subspace
    J = 2.0
    hd = J * SX
    sd = reference_split_explicit(decompose(hd), np.zeros((2, 2)))
    assert np.allclose(sd.delta, hd)
    # H0 reproducing the tolerance split
    P = eigenprojectors()
    s2 = reference_split_explicit(d, R * (P["11"] - P["00"]))
    assert np.allclose(s2.centers, reference_split_by_tolerance(d, 10.0).centers, atol=1e-9)


def test_explicit_split_incompatible():
    d = decompose(two_qubit_hamiltonian(50, 50, 2))
    with pytest.raises(IncompatibleReferenceError):
        reference_split_explicit(d, two_qubit_coupling(1, 1, 0))
    with pytest.raises(InvariantError):
        reference_split_explicit(d, np.zeros((2, 2)))


def test_eq13_formulas_agree():
    d = decompose(two_qubit_hamiltonian(50, 50, 2))
    rng = np.random.default_rng(7)
    a = random_hermitian(rng, 4)
    for tol in (0.0, 10.0):
        split = reference_split_by_tolerance(d, tol)
        j = aggregate_jump_operators(jump_operators(d, split.bohr, [a]), split)
        h0 = split.h0
        for c, op in enumerate(j.cluster_ops[0]):
            center = split.centers[c]
            assert np.allclose(op, cluster_operator_direct(split, a, center), atol=1e-12)
            assert np.allclose(h0 @ op - op @ h0, -center * op, atol=1e-10)
        if tol == 0.0:
            for c, cl in enumerate(split.clusters):
                assert np.allclose(j.cluster_ops[0][c], j.ops[0][cl.members[0]])


def test_validity_diagnostics_two_qubit(fig2):
    rep = validity_diagnostics(fig2.split, fig2.baths, fig2.couplings)
    assert rep.weak_coupling < 1 and rep.cluster_separation < 1
    assert rep.intra_cluster_real < 1 and rep.intra_cluster_imag < 1
    assert rep.weak_coupling == pytest.approx(0.2092, abs=1e-3)
    assert rep.cluster_separation == pytest.approx(0.1110, abs=1e-3)
    assert rep.intra_cluster_real == pytest.approx(0.0371, abs=1e-3)
    assert rep.intra_cluster_imag == pytest.approx(0.8334, abs=1e-3)
    assert rep.flags == []


def test_validity_trivial_split_has_zero_cluster_ratios(fig2):
    trivial = reference_split_by_tolerance(fig2.split.base, 0.0)
    rep = validity_diagnostics(trivial, fig2.baths, fig2.couplings)
    assert rep.intra_cluster_real == 0.0 and rep.intra_cluster_imag == 0.0
    assert rep.delta_ratio <= 1e-14


def test_validity_intra_ratio_finite_difference_oracle():
    # single cluster {-4, 0, 4} around 0 for the dimer with H0 = 0
    b = drude_lorentz_high_temp(1.0, rate_from_lifetime_fs(100.0), 300.0)
    split = reference_split_explicit(decompose(2.0 * SX), np.zeros((2, 2)))
    rep = validity_diagnostics(split, [b], [SZ])
    h = 4.0 / 100
    dg = (b.Gamma(h) - b.Gamma(-h)) / (2 * h)
    g0 = b.Gamma(0.0)
    assert rep.intra_cluster_real == pytest.approx(abs(dg.real) * 4 / abs(g0.real), rel=1e-12)
    assert rep.intra_cluster_imag == pytest.approx(abs(dg.imag) * 4 / abs(g0.imag), rel=1e-12)
    assert rep.cluster_separation == 0.0
