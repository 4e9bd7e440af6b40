"""Noisy bosonic broadcast channel acting on coherent-state inputs.

The channel is classical-quantum: an input amplitude alpha lands at receiver
i as the displaced thermal state with amplitude sqrt(tau_i)*alpha and noise
photon number N_i.  The two-receiver output is kept as a pair of single-mode
states; the product is never materialized.
"""

from dataclasses import dataclass

import numpy as np

from .fock import DensityOperator
from .states import TruncationSpec, displaced_thermal, thermal_state


@dataclass(frozen=True)
class BroadcastParams:
    """Transmissivities, per-receiver noise photons and the energy budget.

    ``beam_splitter=True`` enforces the passive-splitter coupling
    tau2 = 1 - tau1.
    """

    tau1: float
    tau2: float
    N1: float
    N2: float
    E: float
    beam_splitter: bool = False

    def __post_init__(self):
        for name in ("tau1", "tau2"):
            t = getattr(self, name)
            if not np.isfinite(t) or not 0.0 <= t <= 1.0:
                raise ValueError(f"{name}={t} outside [0, 1]")
        for name in ("N1", "N2", "E"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0.0:
                raise ValueError(f"{name}={v} must be finite and >= 0")
        if self.beam_splitter and abs(self.tau1 + self.tau2 - 1.0) > 1e-12:
            raise ValueError(
                f"beam-splitter mode requires tau2 = 1 - tau1, got {self.tau2}"
            )


@dataclass(frozen=True)
class Codeword:
    """Block of coherent amplitudes sent over n channel uses."""

    symbols: tuple

    def __post_init__(self):
        syms = tuple(complex(s) for s in self.symbols)
        if len(syms) < 1:
            raise ValueError("codeword needs at least one symbol")
        if not all(np.isfinite(s.real) and np.isfinite(s.imag) for s in syms):
            raise ValueError("codeword has non-finite symbols")
        object.__setattr__(self, "symbols", syms)

    def __len__(self):
        return len(self.symbols)

    @property
    def total_energy(self) -> float:
        return float(sum(abs(s) ** 2 for s in self.symbols))


def broadcast_output(alpha: complex, params: BroadcastParams, spec: TruncationSpec):
    """Pair of receiver states for one input amplitude."""
    rho1 = displaced_thermal(np.sqrt(params.tau1) * alpha, params.N1, spec)
    rho2 = displaced_thermal(np.sqrt(params.tau2) * alpha, params.N2, spec)
    return rho1, rho2


def marginal(receiver: int, alpha: complex, params: BroadcastParams,
             spec: TruncationSpec) -> DensityOperator:
    """Single-receiver output state; receiver is 1 or 2."""
    if receiver == 1:
        return displaced_thermal(np.sqrt(params.tau1) * alpha, params.N1, spec)
    if receiver == 2:
        return displaced_thermal(np.sqrt(params.tau2) * alpha, params.N2, spec)
    raise ValueError(f"receiver must be 1 or 2, got {receiver}")


def noise_marginal(receiver: int, params: BroadcastParams, dim: int) -> DensityOperator:
    """Receiver output for vacuum input: the bare thermal noise state."""
    n = params.N1 if receiver == 1 else params.N2
    return thermal_state(n, dim)


ENERGY_MODES = ("literal", "per-symbol")


def energy_check(codeword: Codeword, params: BroadcastParams, mode: str = "per-symbol",
                 budget: float | None = None) -> dict:
    """Energy accounting for one codeword.

    ``literal`` caps the block total at the budget; ``per-symbol`` caps it at
    n times the budget.  Both sums ride along in the report.  The budget
    defaults to the channel's E.
    """
    if mode not in ENERGY_MODES:
        raise ValueError(f"mode must be one of {ENERGY_MODES}, got {mode!r}")
    e = params.E if budget is None else float(budget)
    total = codeword.total_energy
    n = len(codeword)
    return {
        "mode": mode,
        "budget": e,
        "n": n,
        "total_energy": total,
        "per_symbol_energy": total / n,
        "literal_ok": bool(total <= e + 1e-12),
        "per_symbol_ok": bool(total <= n * e + 1e-12),
        "ok": bool(total <= e + 1e-12) if mode == "literal" else bool(total <= n * e + 1e-12),
    }
