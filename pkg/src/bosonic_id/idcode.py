"""Random-binning identification codes and their Monte Carlo evaluation.

Pipeline: draw a shared pool of codewords from a discrete constellation,
populate per-message bins by independent inclusion, transmit from bin
intersections, decode with per-message projectors built from the union of
the bin members' typical subspaces, and tally missed/false identification
frequencies against the theoretical bounds.

Rate bookkeeping uses natural-base exponentials (pool size e^{n R_P}, bin
inclusion e^{-n(R_P - Rt)}); Holevo quantities arrive in bits and are
converted once, inside :func:`theoretical_error_bounds`.

Message counts here are explicit small integers.  The doubly exponential
code size exp(e^{nR}) is honored through the (1/n) log log bookkeeping, not
by materializing message sets.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import BroadcastParams, Codeword, energy_check
from .fock import LN2
from .rates import Constellation
from .states import TruncationSpec, displaced_thermal, truncation_channel
from .typicality import TypicalProjector

POOL_CAP = 100_000
DECODER_BASIS_CAP = 2_000
GRAM_RANK_TOL = 1e-10


class CodeDesignError(ValueError):
    """Code parameters violate a structural design condition."""


@dataclass(frozen=True)
class IdCodeParams:
    """Block length, rate ladder and decoder knobs for one code.

    Rates (pool_rate, bin_rate*, id_rate*) and mu are in nats per channel
    use; delta is the typicality window in bits (it feeds log2-based
    projectors); eta is the detection slack of the missed-error budget.
    """

    n: int
    pool_rate: float
    bin_rate1: float
    bin_rate2: float
    id_rate1: float
    id_rate2: float
    mu: float
    delta: float = 0.25
    eta: float = 0.05
    L: int = 0
    M1: int = 4
    M2: int = 4

    def __post_init__(self):
        if self.n < 1:
            raise CodeDesignError(f"block length must be >= 1, got {self.n}")
        if self.L == 0:
            object.__setattr__(self, "L", max(1, math.ceil(math.log2(self.n))))
        if self.L < 1:
            raise CodeDesignError(f"cutoff L must be >= 1, got {self.L}")
        if not max(self.bin_rate1, self.bin_rate2) < self.pool_rate:
            raise CodeDesignError(
                f"pool rate {self.pool_rate} must exceed both bin rates "
                f"({self.bin_rate1}, {self.bin_rate2})"
            )
        if not self.pool_rate < self.bin_rate1 + self.bin_rate2:
            raise CodeDesignError(
                f"pool rate {self.pool_rate} must stay below the bin-rate sum "
                f"{self.bin_rate1 + self.bin_rate2} or intersections die out"
            )
        for i, (bt, r) in enumerate(
                [(self.bin_rate1, self.id_rate1), (self.bin_rate2, self.id_rate2)], start=1):
            margin = min(self.pool_rate - bt, bt - r)
            if not 0.0 < self.mu < margin:
                raise CodeDesignError(
                    f"receiver {i}: mu must lie in (0, {margin:.6g}), got {self.mu}"
                )
        if self.delta <= 0 or not 0.0 <= self.eta < 1.0:
            raise CodeDesignError("delta must be positive and eta in [0, 1)")
        if self.M1 < 1 or self.M2 < 1:
            raise CodeDesignError("message counts must be >= 1")

    def bin_rate(self, receiver: int) -> float:
        return self.bin_rate1 if receiver == 1 else self.bin_rate2

    @property
    def pool_size(self) -> int:
        return int(round(math.exp(self.n * self.pool_rate)))

    @property
    def delta_n(self) -> float:
        """Binning concentration window e^{-n mu / 2}."""
        return math.exp(-self.n * self.mu / 2.0)


@dataclass(frozen=True)
class IdCodebook:
    """Shared pool (as constellation-symbol indices) plus per-receiver bins."""

    pool: np.ndarray          # (pool_size, n) int symbol indices
    bins1: tuple              # M1 sorted index arrays into the pool
    bins2: tuple
    constellation: Constellation
    rng_seed: int | None = None

    @property
    def pool_size(self) -> int:
        return self.pool.shape[0]

    @property
    def n(self) -> int:
        return self.pool.shape[1]

    def bins(self, receiver: int):
        return self.bins1 if receiver == 1 else self.bins2

    def codeword(self, v: int) -> Codeword:
        amps = [self.constellation.amps[j] for j in self.pool[v]]
        return Codeword(symbols=tuple(amps))


def generate_pool(params: IdCodeParams, constellation: Constellation, rng,
                  energy_mode: str = "per-symbol",
                  energy_budget: float | None = None) -> np.ndarray:
    """Draw e^{n R_P} i.i.d. codewords as constellation-symbol indices.

    The per-symbol energy budget defaults to the constellation's peak point
    energy, so a default-configured pool always passes its energy audit.
    """
    size = params.pool_size
    if size > POOL_CAP:
        need = math.log(POOL_CAP) / params.n
        raise CodeDesignError(
            f"pool of {size} exceeds cap {POOL_CAP}; reduce pool_rate below {need:.4f}"
        )
    if size < 1:
        raise CodeDesignError("pool rate rounds to an empty pool")
    probs = np.array(constellation.probs)
    pool = rng.choice(len(probs), size=(size, params.n), p=probs)
    if energy_budget is None:
        energy_budget = max(abs(a) ** 2 for a in constellation.amps)
    energies = np.array([abs(a) ** 2 for a in constellation.amps])[pool].sum(axis=1)
    cap = energy_budget if energy_mode == "literal" else params.n * energy_budget
    bad = np.nonzero(energies > cap + 1e-12)[0]
    if bad.size:
        raise CodeDesignError(
            f"{bad.size} codewords exceed the {energy_mode} energy budget "
            f"{energy_budget:.6g} (first offender index {bad[0]})"
        )
    return pool


def assign_bins(pool, params: IdCodeParams, rng):
    """Independent random bin membership for both receivers.

    Each pool index lands in bin m of receiver i with probability
    e^{-n (R_P - Rt_i)}; only len(pool) is consulted, so any sized object
    works for statistics runs.
    """
    size = len(pool)
    out = []
    for receiver, messages in ((1, params.M1), (2, params.M2)):
        p = math.exp(-params.n * (params.pool_rate - params.bin_rate(receiver)))
        mask = rng.random((messages, size)) < p
        out.append(tuple(np.nonzero(mask[m])[0] for m in range(messages)))
    return out[0], out[1]


def verify_binning(bins, params: IdCodeParams) -> dict:
    """Check the three concentration properties of a random bin assignment.

    Sizes must sit strictly inside (1 -/+ delta_n) e^{n Rt}; pairwise
    overlaps strictly below 2 delta_n e^{n Rt}.  ``good`` is the conjunction.
    The overlap-fraction chain is reported on good assignments; its
    derivable bound is 2 delta_n/(1-delta_n), the tighter delta_n figure is
    evaluated for reference only since it does not follow from the three
    properties.
    """
    bins1, bins2 = bins
    dn = params.delta_n
    report = {"delta_n": dn, "receivers": []}
    good = True
    for receiver, rbins in ((1, bins1), (2, bins2)):
        target = math.exp(params.n * params.bin_rate(receiver))
        lo, hi = (1 - dn) * target, (1 + dn) * target
        sizes = [int(b.size) for b in rbins]
        size_ok = [lo < s < hi for s in sizes]
        overlaps = []
        overlap_ok = []
        for a in range(len(rbins)):
            for b in range(a + 1, len(rbins)):
                ov = int(np.intersect1d(rbins[a], rbins[b]).size)
                overlaps.append({"pair": [a, b], "overlap": ov})
                overlap_ok.append(ov < 2 * dn * target)
        entry = {
            "receiver": receiver,
            "expected_size": target,
            "size_window": [lo, hi],
            "sizes": sizes,
            "sizes_ok": [bool(x) for x in size_ok],
            "overlap_bound": 2 * dn * target,
            "overlaps": overlaps,
            "overlaps_ok": [bool(x) for x in overlap_ok],
        }
        entry["ok"] = bool(all(size_ok) and all(overlap_ok))
        good = good and entry["ok"]
        report["receivers"].append(entry)
    report["good"] = bool(good)
    if good:
        fractions = []
        for entry, rbins in zip(report["receivers"], (bins1, bins2)):
            smallest = min(int(b.size) for b in rbins) or 1
            worst = max((o["overlap"] for o in entry["overlaps"]), default=0)
            fractions.append(worst / smallest)
        chain_bound = 2 * dn / (1 - dn) if dn < 1 else math.inf
        report["overlap_fraction"] = {
            "worst": max(fractions),
            "chain_bound": chain_bound,
            "holds_chain": bool(max(fractions) < chain_bound),
            "delta_n_precondition_ok": bool(dn < 1.0 / 3.0),
            "reference_bound_delta_n": dn,
            "holds_reference": bool(max(fractions) < dn),
        }
    return report


@dataclass(frozen=True)
class TransmitChoice:
    index: int
    used_default: bool


def select_transmit(codebook: IdCodebook, m1: int, m2: int, rng) -> TransmitChoice:
    """Uniform pick from the bin intersection; pool index 0 on empty."""
    common = np.intersect1d(codebook.bins1[m1], codebook.bins2[m2])
    if common.size == 0:
        return TransmitChoice(index=0, used_default=True)
    return TransmitChoice(index=int(rng.choice(common)), used_default=False)


def receiver_symbol_states(constellation: Constellation, receiver: int,
                           channel: BroadcastParams, spec: TruncationSpec,
                           code_dim: int):
    """Per-symbol receiver states: full-cutoff state, its top code_dim x
    code_dim block (the pass branch of the energy threshold), and the
    truncated channel output used to define decoders."""
    tau = channel.tau1 if receiver == 1 else channel.tau2
    noise = channel.N1 if receiver == 1 else channel.N2
    full, blocks, truncated = [], [], []
    for amp in constellation.amps:
        rho = displaced_thermal(np.sqrt(tau) * amp, noise, spec)
        full.append(rho)
        blocks.append(np.array(rho.mat[:code_dim, :code_dim]))
        truncated.append(truncation_channel(rho, code_dim))
    return full, blocks, truncated


class BinDecoder:
    """Projector onto the span of the union of a bin's typical subspaces.

    Stored implicitly: every spanning vector is a product of per-position
    eigenvectors of the truncated symbol states, so Gram matrices and
    acceptance probabilities reduce to per-position dim x dim algebra.
    """

    def __init__(self, receiver: int, message: int, member_indices,
                 member_symbols: np.ndarray, truncated_states, delta: float,
                 basis_cap: int = DECODER_BASIS_CAP):
        self.receiver = receiver
        self.message = message
        self.member_indices = list(member_indices)
        self.member_symbols = member_symbols      # (B, n) symbol ids
        self.n = member_symbols.shape[1] if member_symbols.size else 0
        self.dim = truncated_states[0].dim
        self.delta = delta
        # one eigenbasis per constellation symbol
        self.eigenbases = {}
        seqs, owners = [], []
        for b, syms in enumerate(member_symbols):
            proj = TypicalProjector([truncated_states[j] for j in syms], delta)
            for t, j in enumerate(syms):
                self.eigenbases.setdefault(int(j), proj.eigvecs[t])
            count = proj.typical_set_size()
            if len(seqs) + count > basis_cap:
                raise CodeDesignError(
                    f"decoder basis would exceed {basis_cap} vectors; "
                    "reduce the bin rate or the block length"
                )
            for seq in proj.iter_typical_sequences(cap=basis_cap):
                seqs.append(seq)
                owners.append(b)
        self.sequences = np.array(seqs, dtype=np.int64).reshape(len(seqs), self.n)
        self.owner = np.array(owners, dtype=np.int64)
        self._prepare_gram()

    @property
    def basis_size(self) -> int:
        return self.sequences.shape[0]

    def _pair_product(self, cross_at):
        """Elementwise product over positions of per-pair sandwich values.

        ``cross_at(t)`` returns an (nsym, nsym, dim, dim) array C with
        C[a, b] = V_a^dag X_t V_b for the position-t operator X_t.
        """
        out = np.ones((self.basis_size, self.basis_size), dtype=complex)
        syms = self.member_symbols[self.owner]                # (K, n)
        for t in range(self.n):
            cross = cross_at(t)
            idx_t = self.sequences[:, t]
            out *= cross[syms[:, None, t], syms[None, :, t],
                         idx_t[:, None], idx_t[None, :]]
        return out

    def _symbol_cross(self, mats):
        """(nsym, nsym, dim, dim) array of V_a^dag M V_b sandwiches."""
        nsym = 1 + max(self.eigenbases)
        cross = np.zeros((len(mats), nsym, nsym, self.dim, self.dim), dtype=complex)
        for c, m in enumerate(mats):
            for a, va in self.eigenbases.items():
                for b, vb in self.eigenbases.items():
                    cross[c, a, b] = va.conj().T @ m @ vb
        return cross

    def _prepare_gram(self):
        if self.basis_size == 0:
            self.gram_pinv = np.zeros((0, 0), dtype=complex)
            self.rank = 0
            return
        overlap = self._symbol_cross([np.eye(self.dim)])[0]
        G = self._pair_product(lambda t: overlap)
        vals, vecs = np.linalg.eigh(0.5 * (G + G.conj().T))
        keep = vals > GRAM_RANK_TOL * max(vals[-1], 1.0)
        inv = np.zeros_like(vals)
        inv[keep] = 1.0 / vals[keep]
        self.gram_pinv = (vecs * inv) @ vecs.conj().T
        self.rank = int(np.count_nonzero(keep))
        # flattened sandwich-table indices per position, fixed by the basis
        syms = self.member_symbols[self.owner]
        nsym = 1 + max(self.eigenbases)
        d = self.dim
        self._gather = np.empty((self.n, self.basis_size, self.basis_size),
                                dtype=np.int64)
        for t in range(self.n):
            a = syms[:, t]
            i = self.sequences[:, t]
            self._gather[t] = ((a[:, None] * nsym + a[None, :]) * d
                               + i[:, None]) * d + i[None, :]

    def acceptance(self, symbol_seq, blocks) -> float:
        """Probability that the two-stage test accepts the product state
        whose position-t factor is blocks[symbol_seq[t]].

        ``blocks`` are the sub-threshold dim x dim corners of the received
        states, so the energy-threshold rejection is already folded in.
        """
        return float(self.acceptance_many([symbol_seq], blocks)[0])

    def acceptance_many(self, symbol_seqs, blocks) -> np.ndarray:
        """Vectorized acceptance over a batch of symbol sequences."""
        seqs = np.asarray(symbol_seqs, dtype=np.int64)
        if seqs.ndim != 2 or seqs.shape[1] != self.n:
            if self.n == 0 or (seqs.size == 0 and self.basis_size == 0):
                return np.zeros(len(symbol_seqs))
            raise ValueError(f"expected sequences of length {self.n}")
        K = self.basis_size
        if K == 0:
            return np.zeros(seqs.shape[0])
        cross = self._symbol_cross(blocks)          # (nsym_c, nsym, nsym, d, d)
        flat = cross.reshape(cross.shape[0], -1)
        # per-position, per-test-symbol (K, K) sandwich tables
        tables = np.empty((self.n, flat.shape[0], K, K), dtype=complex)
        for t in range(self.n):
            tables[t] = flat[:, self._gather[t]]
        pinv_t = np.ascontiguousarray(self.gram_pinv.T)
        out = np.empty(seqs.shape[0])
        buf = np.empty((K, K), dtype=complex)
        for v, seq in enumerate(seqs):
            np.copyto(buf, tables[0, seq[0]])
            for t in range(1, self.n):
                buf *= tables[t, seq[t]]
            out[v] = np.real(np.sum(pinv_t * buf))
        return np.clip(out, 0.0, 1.0)


def build_decoder(codebook: IdCodebook, receiver: int, message: int,
                  params: IdCodeParams, channel: BroadcastParams,
                  spec: TruncationSpec,
                  basis_cap: int = DECODER_BASIS_CAP) -> BinDecoder:
    """Decoder for one (receiver, message) bin."""
    members = codebook.bins(receiver)[message]
    if len(members) == 0:
        raise CodeDesignError(
            f"receiver {receiver} bin {message} is empty; cannot build a decoder"
        )
    _, _, truncated = receiver_symbol_states(
        codebook.constellation, receiver, channel, spec, params.L)
    return BinDecoder(
        receiver=receiver, message=message, member_indices=members,
        member_symbols=codebook.pool[members], truncated_states=truncated,
        delta=params.delta, basis_cap=basis_cap,
    )


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054):
    """95% Wilson score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    phat = successes / trials
    denom = 1.0 + z**2 / trials
    center = (phat + z**2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z**2 / (4 * trials**2)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class Estimate:
    value: float
    low: float
    high: float
    successes: int
    trials: int


@dataclass(frozen=True)
class ErrorEstimates:
    missed1: Estimate
    missed2: Estimate
    false1: Estimate
    false2: Estimate
    empty_intersection_rate: float
    detail: dict = field(default_factory=dict)


def _worst_estimate(counts, trials, invert: bool) -> Estimate:
    """Estimate for the worst message: highest miss rate or false rate."""
    worst, est = None, None
    for m in range(len(counts)):
        if trials[m] == 0:
            continue
        bad = trials[m] - counts[m] if invert else counts[m]
        rate = bad / trials[m]
        if worst is None or rate > worst:
            lo, hi = wilson_interval(bad, trials[m])
            worst = rate
            est = Estimate(value=rate, low=lo, high=hi,
                           successes=int(bad), trials=int(trials[m]))
    if est is None:
        return Estimate(value=math.nan, low=math.nan, high=math.nan,
                        successes=0, trials=0)
    return est


def estimate_errors(codebook: IdCodebook, decoders, params: IdCodeParams,
                    channel: BroadcastParams, trials: int, rng,
                    spec: TruncationSpec | None = None,
                    pessimistic_default: bool = True) -> ErrorEstimates:
    """Monte Carlo missed/false identification frequencies.

    Message pairs cycle deterministically; every trial owns an independent
    random stream derived from ``rng``, so reductions are order-free.
    Acceptance probabilities depend only on (receiver, message, codeword)
    and are cached; trials then just flip the measurement coins.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    decoders1, decoders2 = decoders
    spec = spec or TruncationSpec(L=40)
    blocks = {}
    for receiver in (1, 2):
        _, blk, _ = receiver_symbol_states(
            codebook.constellation, receiver, channel, spec, params.L)
        blocks[receiver] = blk

    # acceptance depends only on (receiver, message, codeword): evaluate each
    # decoder once over the whole pool, batched
    cache = {}
    for receiver, decs in ((1, decoders1), (2, decoders2)):
        for message, dec in enumerate(decs):
            cache[receiver, message] = dec.acceptance_many(
                codebook.pool, blocks[receiver])

    def accept_prob(receiver, message, v):
        return cache[receiver, message][v]

    M1, M2 = len(decoders1), len(decoders2)
    pairs = [(m1, m2) for m1 in range(M1) for m2 in range(M2)]
    child_seeds = rng.integers(0, 2**63 - 1, size=trials)

    detect_counts = {1: np.zeros(M1, dtype=np.int64), 2: np.zeros(M2, dtype=np.int64)}
    detect_trials = {1: np.zeros(M1, dtype=np.int64), 2: np.zeros(M2, dtype=np.int64)}
    false_counts = {1: np.zeros(M1, dtype=np.int64), 2: np.zeros(M2, dtype=np.int64)}
    false_trials = {1: np.zeros(M1, dtype=np.int64), 2: np.zeros(M2, dtype=np.int64)}
    empties = 0

    for t in range(trials):
        m1, m2 = pairs[t % len(pairs)]
        trng = np.random.default_rng(int(child_seeds[t]))
        choice = select_transmit(codebook, m1, m2, trng)
        empties += choice.used_default
        v = choice.index
        for receiver, own, count in ((1, m1, M1), (2, m2, M2)):
            forced_miss = choice.used_default and pessimistic_default
            if forced_miss:
                hit = False
            else:
                hit = trng.random() < accept_prob(receiver, own, v)
            detect_counts[receiver][own] += hit
            detect_trials[receiver][own] += 1
            for wrong in range(count):
                if wrong == own:
                    continue
                hit = trng.random() < accept_prob(receiver, wrong, v)
                false_counts[receiver][wrong] += hit
                false_trials[receiver][wrong] += 1

    detail = {
        "detection_rate": {
            r: (detect_counts[r] / np.maximum(detect_trials[r], 1)).tolist()
            for r in (1, 2)
        },
        "false_rate": {
            r: (false_counts[r] / np.maximum(false_trials[r], 1)).tolist()
            for r in (1, 2)
        },
    }
    return ErrorEstimates(
        missed1=_worst_estimate(detect_counts[1], detect_trials[1], invert=True),
        missed2=_worst_estimate(detect_counts[2], detect_trials[2], invert=True),
        false1=_worst_estimate(false_counts[1], false_trials[1], invert=False),
        false2=_worst_estimate(false_counts[2], false_trials[2], invert=False),
        empty_intersection_rate=empties / trials,
        detail=detail,
    )


def theoretical_error_bounds(params: IdCodeParams, holevo_bits) -> dict:
    """Two-term false-identification bound plus the missed-error budget.

    ``holevo_bits`` carries (chi_1, chi_2) in bits; they convert to nats
    here, the single bits-to-nats boundary of the binning machinery.  The
    typicality window delta converts the same way.  A bin rate at or above
    the mutual-information figure is a design violation, not a bound.
    """
    chi1, chi2 = holevo_bits
    out = {"receivers": []}
    for receiver, chi, bt in ((1, chi1, params.bin_rate1), (2, chi2, params.bin_rate2)):
        info_nats = chi * LN2
        if bt >= info_nats:
            raise CodeDesignError(
                f"receiver {receiver}: bin rate {bt} (nats) must stay below the "
                f"Holevo figure {info_nats:.6g} nats ({chi:.6g} bits)"
            )
        overlap_term = math.exp(-params.n * params.mu / 2.0)
        hypothesis_term = math.exp(-params.n * (info_nats - bt - params.delta * LN2))
        lam_L = params.eta + 2.0 ** (1.0 - params.L / 2.0)
        lam_n = params.eta + 2.0 / math.sqrt(params.n)
        out["receivers"].append({
            "receiver": receiver,
            "holevo_bits": chi,
            "holevo_nats": info_nats,
            "missed_bound_from_L": lam_L,
            "missed_bound_from_n": lam_n,
            "overlap_term": overlap_term,
            "hypothesis_term": hypothesis_term,
            "false_bound": overlap_term + hypothesis_term,
        })
    return out


def truncated_holevo(constellation: Constellation, receiver: int,
                     channel: BroadcastParams, spec: TruncationSpec,
                     code_dim: int) -> float:
    """Holevo quantity, in bits, of the energy-thresholded receiver ensemble.

    This is the mutual-information figure the decoders actually face; data
    processing keeps it at or below the untruncated value.
    """
    from .fock import DensityOperator, von_neumann_entropy

    _, _, truncated = receiver_symbol_states(constellation, receiver, channel,
                                             spec, code_dim)
    avg = sum(p * s.mat for p, s in zip(constellation.probs, truncated))
    avg_op = DensityOperator(0.5 * (avg + avg.conj().T))
    return von_neumann_entropy(avg_op) - sum(
        p * von_neumann_entropy(s)
        for p, s in zip(constellation.probs, truncated))


def run_simulation(sim, seed: int) -> dict:
    """Full identification-code lifecycle for one simulation spec.

    Returns a JSON-ready dict: parameter echo, binning report, empirical
    error estimates with intervals, theoretical bounds (or the recorded
    design-condition violation) and the empty-intersection rate.
    """
    from dataclasses import asdict

    from .rates import discretize_gaussian

    channel = sim.channel.params
    spec = TruncationSpec(L=sim.channel.L)
    constellation = discretize_gaussian(channel.E, sim.constellation_size,
                                        sim.constellation_scheme)
    params = IdCodeParams(
        n=sim.n, pool_rate=sim.pool_rate,
        bin_rate1=sim.bin_rate1, bin_rate2=sim.bin_rate2,
        id_rate1=sim.id_rate1, id_rate2=sim.id_rate2,
        mu=sim.mu, delta=sim.delta, eta=sim.eta, L=sim.L,
        M1=sim.M1, M2=sim.M2,
    )
    rng = np.random.default_rng(seed)
    pool = generate_pool(params, constellation, rng)
    bins1, bins2 = assign_bins(pool, params, rng)
    codebook = IdCodebook(pool=pool, bins1=bins1, bins2=bins2,
                          constellation=constellation, rng_seed=seed)
    binning = verify_binning((bins1, bins2), params)
    decoders = (
        [build_decoder(codebook, 1, m, params, channel, spec) for m in range(params.M1)],
        [build_decoder(codebook, 2, m, params, channel, spec) for m in range(params.M2)],
    )
    chi = tuple(truncated_holevo(constellation, r, channel, spec, params.L)
                for r in (1, 2))
    warnings_list = []
    try:
        bounds = theoretical_error_bounds(params, chi)
    except CodeDesignError as err:
        bounds = None
        warnings_list.append(f"design condition violated: {err}")
    estimates = estimate_errors(codebook, decoders, params, channel,
                                sim.trials, rng, spec=spec,
                                pessimistic_default=sim.pessimistic_default)
    return {
        "parameters": {
            "seed": seed,
            "n": params.n,
            "pool_rate": params.pool_rate,
            "bin_rate1": params.bin_rate1,
            "bin_rate2": params.bin_rate2,
            "id_rate1": params.id_rate1,
            "id_rate2": params.id_rate2,
            "mu": params.mu,
            "delta": params.delta,
            "eta": params.eta,
            "L": params.L,
            "M1": params.M1,
            "M2": params.M2,
            "trials": sim.trials,
            "constellation_size": sim.constellation_size,
            "constellation_scheme": sim.constellation_scheme,
            "pessimistic_default": sim.pessimistic_default,
            "pool_size": codebook.pool_size,
            "channel": {
                "tau1": channel.tau1, "tau2": channel.tau2,
                "N1": channel.N1, "N2": channel.N2, "E": channel.E,
                "L": sim.channel.L,
            },
        },
        "holevo_truncated_bits": {"receiver1": chi[0], "receiver2": chi[1]},
        "decoder_basis_sizes": {
            "receiver1": [d.basis_size for d in decoders[0]],
            "receiver2": [d.basis_size for d in decoders[1]],
        },
        "binning": binning,
        "errors": {
            "missed1": asdict(estimates.missed1),
            "missed2": asdict(estimates.missed2),
            "false1": asdict(estimates.false1),
            "false2": asdict(estimates.false2),
            "detail": estimates.detail,
        },
        "empty_intersection_rate": estimates.empty_intersection_rate,
        "bounds": bounds,
        "warnings": warnings_list,
    }


def binning_failure_fractions(ns, pool_rate: float, bin_rate: float, mu: float,
                              id_rate: float, m_per_receiver: int,
                              assignments: int, seed: int) -> list:
    """Fraction of random assignments that miss the good set, per block length."""
    rows = []
    rng = np.random.default_rng(seed)
    for n in ns:
        params = IdCodeParams(
            n=n, pool_rate=pool_rate, bin_rate1=bin_rate, bin_rate2=bin_rate,
            id_rate1=id_rate, id_rate2=id_rate, mu=mu,
            M1=m_per_receiver, M2=m_per_receiver,
        )
        failures = 0
        for _ in range(assignments):
            bins = assign_bins(range(params.pool_size), params, rng)
            failures += not verify_binning(bins, params)["good"]
        rows.append({
            "n": n,
            "pool_size": params.pool_size,
            "delta_n": params.delta_n,
            "assignments": assignments,
            "failure_fraction": failures / assignments,
        })
    return rows
