import numpy as np
import pytest

from bosonic_id.channel import BroadcastParams, Codeword, broadcast_output, energy_check, marginal
from bosonic_id.fock import DensityOperator, mean_photon_number, tensor, trace_norm
from bosonic_id.states import TruncationSpec, coherent_state, thermal_state


def params(**kw):
    base = dict(tau1=0.5, tau2=0.5, N1=0.1, N2=0.2, E=0.5)
    base.update(kw)
    return BroadcastParams(**base)


def test_vacuum_input_gives_bare_noise():
    spec = TruncationSpec(L=30)
    rho1, rho2 = broadcast_output(0.0, params(), spec)
    assert trace_norm(rho1.mat - thermal_state(0.1, 30).mat) < 1e-12
    assert trace_norm(rho2.mat - thermal_state(0.2, 30).mat) < 1e-12


def test_zero_transmissivity_leg_ignores_input():
    spec = TruncationSpec(L=30)
    p = params(tau1=1.0, tau2=0.0)
    _, rho2_a = broadcast_output(0.9, p, spec)
    _, rho2_b = broadcast_output(0.1j, p, spec)
    assert trace_norm(rho2_a.mat - rho2_b.mat) < 1e-12
    assert trace_norm(rho2_a.mat - thermal_state(0.2, 30).mat) < 1e-12


def test_received_mean_photon():
    spec = TruncationSpec(L=40)
    rho1, _ = broadcast_output(1.0, params(tau1=0.5), spec)
    assert abs(mean_photon_number(rho1) - (0.5 + 0.1)) < 1e-4


def test_marginal_matches_broadcast_legs():
    spec = TruncationSpec(L=25)
    p = params()
    rho1, rho2 = broadcast_output(0.4 + 0.1j, p, spec)
    assert trace_norm(marginal(1, 0.4 + 0.1j, p, spec).mat - rho1.mat) < 1e-12
    assert trace_norm(marginal(2, 0.4 + 0.1j, p, spec).mat - rho2.mat) < 1e-12
    with pytest.raises(ValueError, match="receiver"):
        marginal(3, 0.0, p, spec)


def test_marginal_equals_partial_trace_of_product():
    spec = TruncationSpec(L=8, construction_dim=40)
    p = params()
    rho1, rho2 = broadcast_output(0.3, p, spec)
    joint = tensor(rho1.mat, rho2.mat)
    # trace out the second mode explicitly
    reduced = joint.reshape(8, 8, 8, 8).trace(axis1=1, axis2=3)
    assert trace_norm(reduced - rho1.mat * rho2.trace) < 1e-12


def test_ideal_leg_outputs_coherent_state():
    spec = TruncationSpec(L=40)
    p = params(tau1=1.0, N1=0.0)
    rho = marginal(1, 0.6, p, spec)
    vec = coherent_state(0.6, 40)
    assert 0.5 * trace_norm(rho.mat - np.outer(vec, vec.conj())) < 1e-8


def test_energy_check_zero_codeword():
    report = energy_check(Codeword(symbols=(0.0, 0.0, 0.0)), params())
    assert report["literal_ok"] and report["per_symbol_ok"]


def test_energy_check_boundary():
    e = 0.5
    cw = Codeword(symbols=tuple([np.sqrt(e)] * 4))
    report = energy_check(cw, params(E=e), mode="literal")
    assert not report["ok"]
    report = energy_check(cw, params(E=e), mode="per-symbol")
    assert report["ok"]
    assert abs(report["total_energy"] - 4 * e) < 1e-12


def test_energy_check_single_use():
    cw = Codeword(symbols=(np.sqrt(0.5),))
    report = energy_check(cw, params(E=0.5))
    assert report["literal_ok"] and report["per_symbol_ok"]


def test_energy_check_mode_validation():
    with pytest.raises(ValueError, match="mode"):
        energy_check(Codeword(symbols=(0.0,)), params(), mode="bogus")


def test_memoryless_products_factorize():
    spec = TruncationSpec(L=8, construction_dim=40)
    p = params()
    rho_a = marginal(1, 0.3, p, spec)
    rho_b = marginal(1, -0.2j, p, spec)
    joint = tensor(rho_a.mat, rho_b.mat)
    proj = np.diag(np.arange(8) < 3).astype(complex)
    lhs = np.real(np.trace(tensor(proj, proj) @ joint))
    rhs = np.real(np.trace(proj @ rho_a.mat)) * np.real(np.trace(proj @ rho_b.mat))
    assert abs(lhs - rhs) < 1e-12


def test_beam_splitter_sweep_monotone():
    spec = TruncationSpec(L=40)
    e = 0.5
    photons = []
    for tau1 in np.linspace(0.0, 1.0, 11):
        p = BroadcastParams(tau1=float(tau1), tau2=float(1 - tau1),
                            N1=0.1, N2=0.1, E=e, beam_splitter=True)
        rho1 = marginal(1, np.sqrt(e), p, spec)
        photons.append(mean_photon_number(rho1))
    assert abs(photons[0] - 0.1) < 1e-4
    assert abs(photons[-1] - 0.6) < 1e-4
    assert all(b > a for a, b in zip(photons, photons[1:]))


def test_params_validation():
    with pytest.raises(ValueError):
        params(tau1=1.2)
    with pytest.raises(ValueError):
        params(N1=-0.1)
    with pytest.raises(ValueError, match="beam-splitter"):
        BroadcastParams(tau1=0.3, tau2=0.3, N1=0.1, N2=0.1, E=0.5,
                        beam_splitter=True)


def test_codeword_validation():
    with pytest.raises(ValueError):
        Codeword(symbols=())
    cw = Codeword(symbols=(1.0, 1.0j))
    assert abs(cw.total_energy - 2.0) < 1e-12
