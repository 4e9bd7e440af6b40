import math

import numpy as np
import pytest

from bosonic_id.channel import BroadcastParams
from bosonic_id.fock import trace_norm, von_neumann_entropy
from bosonic_id.rates import (
    Constellation,
    capacity_p2p,
    convergence_study,
    discretize_gaussian,
    gordon_g,
    holevo_quantity,
    id_rate_corner,
    rate_region_sweep,
)
from bosonic_id.states import TruncationSpec, thermal_state

# mpmath references, 50 digits
G_01 = 0.483446685613665
CORNER_05 = 1.04364771906628   # g(0.6) - g(0.1)
CORNER_025 = 0.631149124699494  # g(0.35) - g(0.1)
CHI_ANTIPODAL_05 = 0.715349166710722  # H2((1 + e^-0.5)/2)


def test_g_trivial_points():
    assert gordon_g(0.0) == 0.0
    assert abs(gordon_g(1.0) - 2.0) < 1e-14
    assert abs(gordon_g(0.1) - G_01) < 1e-6


def test_g_rejects_negative():
    with pytest.raises(ValueError):
        gordon_g(-0.01)


def test_g_monotone_and_concave():
    xs = np.linspace(0.0, 3.0, 61)
    vals = [gordon_g(x) for x in xs]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    second = np.diff(vals, 2)
    assert np.all(second < 1e-12)


@pytest.mark.parametrize("noise", [0.05, 0.1, 0.25, 0.5, 1.0])
def test_g_matches_thermal_entropy(noise):
    assert abs(gordon_g(noise) - von_neumann_entropy(thermal_state(noise, 60))) < 1e-6


def test_capacity_trivial():
    assert capacity_p2p(0.7, 0.0, 0.3) == 0.0
    assert abs(capacity_p2p(1.0, 0.8, 0.0) - gordon_g(0.8)) < 1e-14


def test_capacity_two_code_paths_agree():
    tau, e, n = 0.5, 0.5, 0.1

    def direct(x):
        return (x + 1) * math.log2(x + 1) - x * math.log2(x) if x > 0 else 0.0

    expected = direct(tau * e + (1 - tau) * n) - direct((1 - tau) * n)
    assert abs(capacity_p2p(tau, e, n) - expected) < 1e-12


def test_corner_zero_energy():
    p = BroadcastParams(tau1=0.6, tau2=0.4, N1=0.1, N2=0.2, E=0.0)
    assert id_rate_corner(p) == (0.0, 0.0)


def test_corner_reference_values():
    p = BroadcastParams(tau1=1.0, tau2=0.0, N1=0.1, N2=0.1, E=0.5)
    r1, _ = id_rate_corner(p)
    assert abs(r1 - CORNER_05) < 1e-9
    p = BroadcastParams(tau1=1.0, tau2=0.0, N1=0.1, N2=0.1, E=0.25)
    r1, _ = id_rate_corner(p)
    assert abs(r1 - CORNER_025) < 1e-9


def test_corner_monotone_in_energy():
    prev = (0.0, 0.0)
    for e in (0.1, 0.2, 0.4, 0.8):
        p = BroadcastParams(tau1=0.7, tau2=0.3, N1=0.1, N2=0.2, E=e)
        r = id_rate_corner(p)
        assert r[0] >= prev[0] and r[1] >= prev[1]
        prev = r


def test_sweep_endpoints_and_monotone_structure():
    points = rate_region_sweep(0.1, 0.1, 0.5, 11)
    assert points[0].tau1 == 0.0 and points[0].R1 == 0.0
    assert abs(points[-1].R1 - CORNER_05) < 1e-9 and points[-1].R2 == 0.0
    two = rate_region_sweep(0.1, 0.1, 0.5, 2)
    assert [p.tau1 for p in two] == [0.0, 1.0]
    with pytest.raises(ValueError):
        rate_region_sweep(0.1, 0.1, 0.5, 1)


def test_sweep_energy_dominance():
    big = rate_region_sweep(0.1, 0.1, 0.5, 21)
    small = rate_region_sweep(0.1, 0.1, 0.25, 21)
    for hi, lo in zip(big, small):
        assert hi.R1 >= lo.R1 and hi.R2 >= lo.R2
        if lo.R1 > 0 or hi.R1 > 0:
            assert hi.R1 > lo.R1
        if lo.R2 > 0 or hi.R2 > 0:
            assert hi.R2 > lo.R2


def test_holevo_single_point_is_zero():
    c = Constellation(probs=(1.0,), amps=(0.3 + 0.1j,))
    p = BroadcastParams(tau1=1.0, tau2=0.0, N1=0.1, N2=0.1, E=0.5)
    assert abs(holevo_quantity(c, 1, p)) < 1e-10


def test_holevo_antipodal_pure_states():
    c = Constellation(probs=(0.5, 0.5), amps=(0.5, -0.5))
    p = BroadcastParams(tau1=1.0, tau2=0.0, N1=0.0, N2=0.0, E=0.25)
    chi = holevo_quantity(c, 1, p)
    assert abs(chi - CHI_ANTIPODAL_05) < 1e-6


def test_holevo_dense_grid_approaches_capacity():
    c = discretize_gaussian(0.5, 64, "grid")
    p = BroadcastParams(tau1=1.0, tau2=0.0, N1=0.1, N2=0.1, E=0.5)
    chi = holevo_quantity(c, 1, p)
    assert abs(chi - CORNER_05) < 0.02


@pytest.mark.parametrize("scheme,size", [("grid", 16), ("rings", 16)])
def test_holevo_stays_inside_rate_region(scheme, size):
    c = discretize_gaussian(0.5, size, scheme)
    p = BroadcastParams(tau1=0.6, tau2=0.4, N1=0.1, N2=0.2, E=0.5)
    r1, r2 = id_rate_corner(p)
    assert holevo_quantity(c, 1, p) <= r1 + 0.01
    assert holevo_quantity(c, 2, p) <= r2 + 0.01


def test_discretize_single_point():
    for scheme in ("grid", "rings"):
        c = discretize_gaussian(0.5, 1, scheme)
        assert c.size == 1 and c.amps == (0j,)


@pytest.mark.parametrize("scheme,size", [("grid", 64), ("rings", 64)])
def test_discretize_second_moment(scheme, size):
    c = discretize_gaussian(0.5, size, scheme)
    assert c.mean_energy <= 0.5 * (1 + 1e-9)
    assert abs(c.mean_energy - 0.5) / 0.5 < 0.02


def test_ring_scheme_centered():
    c = discretize_gaussian(0.5, 24, "rings")
    assert abs(c.mean_amplitude) < 1e-15


def test_discretize_size_validation():
    with pytest.raises(ValueError, match="square"):
        discretize_gaussian(0.5, 12, "grid")
    with pytest.raises(ValueError, match="multiple of 8"):
        discretize_gaussian(0.5, 12, "rings")
    with pytest.raises(ValueError, match="scheme"):
        discretize_gaussian(0.5, 4, "hex")


def test_convergence_zero_energy_is_exact():
    rows, summary = convergence_study(0.0, 0.7, 0.1, [1, 4])
    assert all(r["epsilon_bits"] < 1e-12 for r in rows)
    assert summary["tail_nonincreasing"]


def test_convergence_requires_ascending_sizes():
    with pytest.raises(ValueError):
        convergence_study(0.5, 1.0, 0.1, [64, 16])


def test_convergence_small_pipeline():
    rows, summary = convergence_study(0.5, 1.0, 0.1, [16, 64],
                                      spec=TruncationSpec(L=40))
    assert rows[0]["epsilon_bits"] >= rows[1]["epsilon_bits"]
    assert summary["target_bits"] == pytest.approx(CORNER_05, abs=1e-9)


def test_sweep_argmax_invariant_under_rescaling():
    points = rate_region_sweep(0.1, 0.1, 0.5, 51)
    sums = [p.R1 + p.R2 for p in points]
    scaled = [7.3 * s for s in sums]
    assert int(np.argmax(sums)) == int(np.argmax(scaled))


def test_constellation_validation():
    with pytest.raises(ValueError):
        Constellation(probs=(0.6, 0.6), amps=(0.0, 1.0))
    with pytest.raises(ValueError):
        Constellation(probs=(), amps=())
    with pytest.raises(ValueError):
        Constellation(probs=(1.2, -0.2), amps=(0.0, 1.0))
