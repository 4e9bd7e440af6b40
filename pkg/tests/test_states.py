import math

import numpy as np
import pytest

from bosonic_id.fock import BinaryPovm, DensityOperator, FockSpaceError, fock_projector, mean_photon_number, trace_norm, von_neumann_entropy
from bosonic_id.states import (
    MassLossWarning,
    TruncationSpec,
    coherent_state,
    displaced_thermal,
    displacement_matrix,
    gentle_operator_check,
    thermal_state,
    truncation_channel,
    truncation_mass_bound_check,
)

G_01 = 0.483446685613665


def overlap_formula(a, b):
    return np.exp(-(abs(a) ** 2 + abs(b) ** 2) / 2 + np.conj(a) * b)


def test_coherent_vacuum_is_exact():
    vec = coherent_state(0.0, 5)
    assert np.array_equal(vec, np.array([1, 0, 0, 0, 0], dtype=complex))


def test_coherent_norm_deficit_tiny():
    vec = coherent_state(1.0, 40)
    deficit = 1.0 - np.linalg.norm(vec) ** 2
    assert 0.0 <= deficit < 1e-12


def test_coherent_overlap_closed_form():
    a, b = 1.0, 0.5j
    va = coherent_state(a, 60)
    vb = coherent_state(b, 60)
    assert abs(np.vdot(va, vb) - overlap_formula(a, b)) < 1e-10


def test_coherent_mass_loss_warning():
    with pytest.warns(MassLossWarning):
        coherent_state(4.0, 8)  # |alpha|^2 = 16 barely fits in 8 levels


def test_displacement_of_zero_is_identity():
    spec = TruncationSpec(L=6)
    assert np.allclose(displacement_matrix(0.0, spec), np.eye(spec.construction_dim))


def test_displacement_moves_vacuum_to_coherent_state():
    spec = TruncationSpec(L=20, construction_dim=60)
    alpha = 0.7 + 0.2j
    disp = displacement_matrix(alpha, spec)
    assert np.linalg.norm(disp[:20, 0] - coherent_state(alpha, 20)) < 1e-9


def test_displacement_group_inverse():
    spec = TruncationSpec(L=12, construction_dim=40)
    d_plus = displacement_matrix(0.8, spec)
    d_minus = displacement_matrix(-0.8, spec)
    inner = (d_plus @ d_minus)[:12, :12]
    assert trace_norm(inner - np.eye(12)) < 1e-8


def test_displacement_rejects_inadequate_construction():
    spec = TruncationSpec(L=30, construction_dim=32)
    with pytest.raises(FockSpaceError, match="construction_dim"):
        displacement_matrix(5.0, spec)


def test_thermal_zero_temperature():
    rho = thermal_state(0.0, 6)
    assert np.allclose(rho.mat, np.diag([1, 0, 0, 0, 0, 0]))


def test_thermal_entropy_reference():
    assert abs(von_neumann_entropy(thermal_state(0.1, 60)) - G_01) < 1e-6


def test_thermal_mean_photon_geometric_oracle():
    rho = thermal_state(0.1, 60)
    n = np.arange(60)
    expected = float(np.sum(n * (1 / 1.1) * (0.1 / 1.1) ** n))
    assert abs(mean_photon_number(rho) - expected) < 1e-12
    assert abs(mean_photon_number(rho) - 0.1) < 1e-8


def test_thermal_renormalization_flag():
    small = thermal_state(0.1, 60)
    assert not small.renormalized
    hot = thermal_state(5.0, 10)  # heavy geometric tail beyond 10 levels
    assert hot.renormalized
    assert abs(hot.trace - 1.0) < 1e-12


def test_displaced_thermal_zero_displacement():
    spec = TruncationSpec(L=30)
    rho = displaced_thermal(0.0, 0.2, spec)
    assert trace_norm(rho.mat - thermal_state(0.2, 30).mat) < 1e-12


def test_displaced_thermal_coherent_limit():
    spec = TruncationSpec(L=40)
    rho = displaced_thermal(0.5, 0.0, spec)
    vec = coherent_state(0.5, 40)
    assert 0.5 * trace_norm(rho.mat - np.outer(vec, vec.conj())) < 1e-8


def test_displaced_thermal_entropy_matches_thermal():
    spec = TruncationSpec(L=60)
    rho = displaced_thermal(1.0, 0.1, spec)
    assert abs(von_neumann_entropy(rho) - G_01) < 5e-4


def test_displaced_thermal_mass_loss_flag():
    spec = TruncationSpec(L=3, construction_dim=40)
    rho = displaced_thermal(1.5, 0.1, spec)
    assert rho.mass_loss
    assert rho.trace < 1.0


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 1.0 + 1.0j])
@pytest.mark.parametrize("noise", [0.05, 0.1, 0.5])
def test_displaced_thermal_entropy_alpha_independent(alpha, noise):
    spec = TruncationSpec(L=60, construction_dim=90)
    rho = displaced_thermal(alpha, noise, spec)
    target = von_neumann_entropy(thermal_state(noise, 60))
    assert abs(von_neumann_entropy(rho) - target) < 5e-4
    assert abs(mean_photon_number(rho) - (abs(alpha) ** 2 + noise)) < 1e-4


def test_truncation_channel_identity_on_supported_states():
    rho = thermal_state(0.05, 8)
    padded = np.zeros((20, 20), dtype=complex)
    padded[:8, :8] = rho.mat
    out = truncation_channel(DensityOperator(padded), 8)
    assert trace_norm(out.mat - rho.mat) < 1e-12


def test_truncation_channel_trace_and_vacuum_weight():
    rng = np.random.default_rng(21)
    for _ in range(10):
        raw = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
        mat = raw @ raw.conj().T
        rho = DensityOperator(mat / np.trace(mat).real)
        keep = 5
        out = truncation_channel(rho, keep)
        assert abs(out.trace - 1.0) < 1e-10
        deficit = rho.trace - np.real(np.trace(rho.mat[:keep, :keep]))
        assert abs((out.mat[0, 0] - rho.mat[0, 0]) - deficit) < 1e-10


def test_truncation_channel_perturbation_bound():
    spec = TruncationSpec(L=40)
    rho = displaced_thermal(1.0, 0.1, spec)
    keep = 12
    out = truncation_channel(rho, keep)
    padded = np.zeros((40, 40), dtype=complex)
    padded[:keep, :keep] = out.mat
    assert trace_norm(padded - rho.mat) <= 2.0 ** (2 - keep / 2)


def test_mass_bound_vacuum_case():
    report = truncation_mass_bound_check(0.0, 7)
    assert report["lhs"] == 1.0 and report["holds"]


def test_mass_bound_reference_point():
    report = truncation_mass_bound_check(1.0, 5)
    assert abs(report["lhs"] - 0.999405815182) < 1e-9
    assert abs(report["rhs"] - (1 - 32 / 120)) < 1e-12
    assert report["holds"]


def test_mass_bound_alpha_two():
    report = truncation_mass_bound_check(2.0, 10)
    assert report["holds"]
    assert abs(report["lhs"] - 0.997160233879) < 1e-9


def test_gentle_check_identity_is_lossless():
    rho = thermal_state(0.2, 10)
    report = gentle_operator_check(rho, BinaryPovm(np.eye(10)))
    assert report["epsilon"] == 0.0
    assert report["lhs"] <= 1e-12
    assert report["holds"]


def test_gentle_check_photon_threshold():
    spec = TruncationSpec(L=60)
    rho = displaced_thermal(1.0, 0.1, spec)
    povm = BinaryPovm(fock_projector(60, 11))  # keep counts 0..10
    report = gentle_operator_check(rho, povm)
    assert report["holds"]
    assert report["lhs"] > 0.0


def test_gentle_check_random_trials():
    rng = np.random.default_rng(17)
    for _ in range(100):
        raw = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        mat = raw @ raw.conj().T
        rho = DensityOperator(mat / np.trace(mat).real)
        basis = np.linalg.qr(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))[0]
        eigs = rng.uniform(0.9, 1.0, size=6)
        povm = BinaryPovm((basis * eigs) @ basis.conj().T)
        assert gentle_operator_check(rho, povm)["holds"]


def test_truncation_spec_validation():
    with pytest.raises(ValueError):
        TruncationSpec(L=0)
    with pytest.raises(ValueError):
        TruncationSpec(L=10, construction_dim=5)
    assert TruncationSpec(L=10).construction_dim == 30
