"""Seeded Monte Carlo engine: power sweeps, block trials, leakage runs.

Every random draw is keyed by (master seed, purpose, grid index, batch
index) with a fixed batch size, so reports are bit-identical across runs
and do not depend on how trials might be distributed over workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import __version__
from .channel import ChannelGains, NoiseModel, effective_power, normalize_gains, sample_gains, transmit
from .codec import build_codebook, decode_messages, encode, hard_decode, scale_to_channel
from .constellation import (
    ENUMERATION_CAP,
    pe_upper_bound,
    received_constellation,
    select_params,
)
from .errors import ParameterError, SizeCapError
from .rng import stream, substream
from .secrecy import LeakageReport, leakage_estimate, sdof_fit, sum_rate_lower_bound

TRIAL_BATCH = 8192
WILSON_Z = 1.959963984540054  # two-sided 95%


def wilson_interval(errors: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (valid at 0 counts)."""
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    if not 0 <= errors <= trials:
        raise ParameterError(f"errors {errors} outside [0, {trials}]")
    p = errors / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class SimConfig:
    """Inputs for one simulation campaign.

    Gains come either from explicit (h, h_e) or from seeded uniform
    sampling on [gains_low, gains_high]; the sampling seed defaults to
    the master seed.
    """

    K: int
    epsilon: float
    P_grid: tuple[float, ...]
    trials: int = 10_000
    n: int = 4
    master_seed: int = 0
    variance: float = 1.0
    h: tuple[float, ...] | None = None
    h_e: tuple[float, ...] | None = None
    gains_seed: int | None = None
    gains_low: float = 0.5
    gains_high: float = 2.0
    bin_width: float | None = None
    leakage_samples: int = 100_000
    cap: int = ENUMERATION_CAP
    table_cap: int = 65_536  # max codebook sequences per user in block runs

    def __post_init__(self):
        object.__setattr__(self, "P_grid", tuple(float(p) for p in self.P_grid))
        if self.K < 2:
            raise ParameterError(f"K must be >= 2, got {self.K}")
        if not 0 < self.epsilon < 1:
            raise ParameterError(f"epsilon must be in (0,1), got {self.epsilon}")
        if not self.P_grid:
            raise ParameterError("P grid is empty")
        if any(b <= a for a, b in zip(self.P_grid, self.P_grid[1:])):
            raise ParameterError("P grid must be strictly increasing")
        if any(p <= 0 for p in self.P_grid):
            raise ParameterError("P grid values must be positive")
        if self.trials < 1:
            raise ParameterError(f"trials must be >= 1, got {self.trials}")
        if self.n < 1:
            raise ParameterError(f"block length must be >= 1, got {self.n}")
        if self.variance < 0:
            raise ParameterError(f"variance must be >= 0, got {self.variance}")
        if (self.h is None) != (self.h_e is None):
            raise ParameterError("give both h and h_e, or neither")
        if self.h is not None and (len(self.h) != self.K or len(self.h_e) != self.K):
            raise ParameterError(f"h and h_e must each list {self.K} gains")

    def resolve_gains(self) -> ChannelGains:
        if self.h is not None:
            return ChannelGains(h=tuple(self.h), h_e=tuple(self.h_e))
        seed = self.master_seed if self.gains_seed is None else self.gains_seed
        return sample_gains(seed, self.K, self.gains_low, self.gains_high)


@dataclass(frozen=True)
class SweepRow:
    P: float
    P_tilde: float
    Q: int
    A: float
    d_min: float
    pe_tail_bound: float
    pe_exp_bound: float
    pe_mc: float
    pe_mc_ci_low: float
    pe_mc_ci_high: float
    r_sum_bound_bits: float
    eta_running: float


SWEEP_COLUMNS = (
    "P",
    "P_tilde",
    "Q",
    "A",
    "d_min",
    "pe_tail_bound",
    "pe_exp_bound",
    "pe_mc",
    "pe_mc_ci_low",
    "pe_mc_ci_high",
    "r_sum_bound_bits",
    "eta_running",
)


def fmt(x) -> str:
    """Lossless CSV cell: 17 significant digits for floats, plain ints."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]
    slope: float
    intercept: float
    residual: float
    gains: ChannelGains
    master_seed: int
    epsilon: float
    variance: float
    trials: int
    version: str = __version__

    def to_csv(self) -> str:
        lines = [",".join(SWEEP_COLUMNS)]
        for r in self.rows:
            lines.append(",".join(fmt(getattr(r, c)) for c in SWEEP_COLUMNS))
        return "\n".join(lines) + "\n"

    def metadata(self) -> dict:
        return {
            "version": self.version,
            "master_seed": self.master_seed,
            "epsilon": self.epsilon,
            "variance": self.variance,
            "trials": self.trials,
            "h": ",".join(fmt(x) for x in self.gains.h),
            "h_e": ",".join(fmt(x) for x in self.gains.h_e),
            "slope": fmt(self.slope),
            "intercept": fmt(self.intercept),
            "fit_residual": fmt(self.residual),
        }


def _sweep_point(cfg: SimConfig, gains: ChannelGains, g, pi: int, P: float) -> SweepRow:
    P_t = effective_power(gains, P)
    Q, A = select_params(P_t, cfg.K, cfg.epsilon)
    amp = A * abs(g.scale)
    rc = received_constellation(g, Q, amp, cap=cfg.cap)
    tail, expb = pe_upper_bound(rc.d_min)
    sgn = 1.0 if g.scale >= 0 else -1.0
    h_e = np.asarray(gains.h_e)

    errors = 0
    noise = NoiseModel(cfg.variance)
    for b0 in range(0, cfg.trials, TRIAL_BATCH):
        bs = min(TRIAL_BATCH, cfg.trials - b0)
        bi = b0 // TRIAL_BATCH
        v = stream(cfg.master_seed, "sweep/input", pi, bi).integers(
            -Q, Q + 1, size=(bs, cfg.K)
        )
        x = (A * v / h_e).T  # shape (K, bs)
        y, _ = transmit(x, gains, noise, substream(cfg.master_seed, "sweep/noise", pi, bi))
        dec = hard_decode(sgn * y, rc)
        errors += int(np.count_nonzero(np.any(dec != v, axis=1)))

    pe_mc = errors / cfg.trials
    ci_low, ci_high = wilson_interval(errors, cfg.trials)
    r_sum = sum_rate_lower_bound(cfg.K, Q, pe_mc)
    eta = r_sum / (0.5 * math.log2(P)) if P > 1 else math.nan
    return SweepRow(
        P=P,
        P_tilde=P_t,
        Q=Q,
        A=A,
        d_min=rc.d_min,
        pe_tail_bound=tail,
        pe_exp_bound=expb,
        pe_mc=pe_mc,
        pe_mc_ci_low=ci_low,
        pe_mc_ci_high=ci_high,
        r_sum_bound_bits=r_sum,
        eta_running=eta,
    )


def run_symbol_sweep(cfg: SimConfig) -> SweepReport:
    """Per-power-point symbol error simulation against the analytic bounds.

    Each grid point builds its received constellation, draws uniform
    symbol tuples, sends them through the channel, hard-decodes, and
    counts tuple errors with a Wilson 95% interval.  Any failing grid
    point aborts the sweep with the offending P in the message.
    """
    gains = cfg.resolve_gains()
    g = normalize_gains(gains)
    rows = []
    for pi, P in enumerate(cfg.P_grid):
        try:
            rows.append(_sweep_point(cfg, gains, g, pi, P))
        except (ParameterError, SizeCapError) as exc:
            exc.args = (f"{exc.args[0] if exc.args else exc} [grid point P={P}]",)
            raise
    try:
        fit = sdof_fit([(r.P, r.r_sum_bound_bits) for r in rows])
        slope, intercept, residual = fit
    except ParameterError:
        slope = intercept = residual = math.nan
    return SweepReport(
        rows=tuple(rows),
        slope=slope,
        intercept=intercept,
        residual=residual,
        gains=gains,
        master_seed=cfg.master_seed,
        epsilon=cfg.epsilon,
        variance=cfg.variance,
        trials=cfg.trials,
    )


BLOCK_COLUMNS = (
    "P",
    "P_tilde",
    "Q",
    "A",
    "n",
    "B",
    "L",
    "rate_bits_per_user",
    "trials",
    "block_errors",
    "bler",
    "bler_ci_low",
    "bler_ci_high",
    "decode_failures",
    "cross_bin_duplicates",
)


@dataclass(frozen=True)
class BlockReport:
    P: float
    P_tilde: float
    Q: int
    A: float
    n: int
    B: int
    L: int
    rate_bits_per_user: float
    trials: int
    block_errors: int
    bler: float
    bler_ci_low: float
    bler_ci_high: float
    decode_failures: int
    cross_bin_duplicates: int
    gains: ChannelGains
    master_seed: int
    version: str = __version__

    def to_csv(self) -> str:
        header = ",".join(BLOCK_COLUMNS)
        row = ",".join(fmt(getattr(self, c)) for c in BLOCK_COLUMNS)
        return f"{header}\n{row}\n"

    def metadata(self) -> dict:
        return {
            "version": self.version,
            "master_seed": self.master_seed,
            "h": ",".join(fmt(x) for x in self.gains.h),
            "h_e": ",".join(fmt(x) for x in self.gains.h_e),
        }


def derive_code_sizes(cfg: SimConfig, Q: int) -> tuple[int, int]:
    """(B, L) for block runs: B = 2^ceil(n R) with the per-user rate R
    taken as an equal split of the secrecy sum-rate bound at P_e = 0,
    and L growing toward the uniform-input budget within the caps.

    Exact-match decoding turns a sequence duplicated across bins into an
    ambiguity, so the table is kept under 1/256 of the sequence space;
    at block lengths where even that is impossible L degenerates to 1.
    """
    r_user = sum_rate_lower_bound(cfg.K, Q, 0.0) / cfg.K
    B = 2 ** math.ceil(cfg.n * r_user)
    budget_bits = cfg.n * (math.log2(2 * Q + 1) - r_user)
    L = 2 ** max(0, math.ceil(budget_bits))
    space = (2 * Q + 1) ** cfg.n
    max_table = min(cfg.table_cap, space // 256)
    L = max(1, min(L, max_table // B))
    return B, L


def run_block_trials(cfg: SimConfig) -> BlockReport:
    """Full encode/transmit/decode pipeline at the top of the power grid.

    A trial errs when any user's recovered bin differs from its message
    (a sequence missing from the table counts as an error too).
    """
    gains = cfg.resolve_gains()
    g = normalize_gains(gains)
    P = cfg.P_grid[-1]
    P_t = effective_power(gains, P)
    Q, A = select_params(P_t, cfg.K, cfg.epsilon)
    B, L = derive_code_sizes(cfg, Q)
    codebooks = [
        build_codebook(cfg.n, Q, B, L, substream(cfg.master_seed, "block/codebook"), user_k=k)
        for k in range(cfg.K)
    ]
    amp = A * abs(g.scale)
    rc = received_constellation(g, Q, amp, cap=cfg.cap)
    sgn = 1.0 if g.scale >= 0 else -1.0
    noise = NoiseModel(cfg.variance)

    errors = 0
    failures = 0
    for t in range(cfg.trials):
        msgs = stream(cfg.master_seed, "block/messages", t).integers(0, B, size=cfg.K)
        enc_seed = substream(cfg.master_seed, "block/encode", t)
        x = np.empty((cfg.K, cfg.n))
        for k in range(cfg.K):
            xt = encode(codebooks[k], int(msgs[k]), enc_seed)
            x[k] = scale_to_channel(xt, A, gains.h_e[k])
        y, _ = transmit(x, gains, noise, substream(cfg.master_seed, "block/noise", t))
        dec = hard_decode(sgn * y, rc)  # (n, K)
        recovered = decode_messages([dec[:, k] for k in range(cfg.K)], codebooks)
        trial_fail = any(r is None for r in recovered)
        failures += int(trial_fail)
        if trial_fail or any(r != int(w) for r, w in zip(recovered, msgs)):
            errors += 1

    ci_low, ci_high = wilson_interval(errors, cfg.trials)
    cross = sum(cb.duplicate_stats().cross_bin_duplicates for cb in codebooks)
    return BlockReport(
        P=P,
        P_tilde=P_t,
        Q=Q,
        A=A,
        n=cfg.n,
        B=B,
        L=L,
        rate_bits_per_user=math.log2(B) / cfg.n,
        trials=cfg.trials,
        block_errors=errors,
        bler=errors / cfg.trials,
        bler_ci_low=ci_low,
        bler_ci_high=ci_high,
        decode_failures=failures,
        cross_bin_duplicates=cross,
        gains=gains,
        master_seed=cfg.master_seed,
    )


LEAKAGE_COLUMNS = (
    "P",
    "P_tilde",
    "Q",
    "A",
    "variance",
    "bin_width",
    "samples",
    "exhaustive",
    "mi_bits",
    "sum_entropy_bits",
    "input_entropy_bits",
    "residual_bits",
    "bias_bound_bits",
)


@dataclass(frozen=True)
class LeakageRunReport:
    P: float
    P_tilde: float
    Q: int
    A: float
    variance: float
    bin_width: float
    samples: int
    exhaustive: bool
    estimate: LeakageReport
    gains: ChannelGains
    master_seed: int
    version: str = __version__

    def to_csv(self) -> str:
        vals = {
            "P": self.P,
            "P_tilde": self.P_tilde,
            "Q": self.Q,
            "A": self.A,
            "variance": self.variance,
            "bin_width": self.bin_width,
            "samples": self.samples,
            "exhaustive": int(self.exhaustive),
            "mi_bits": self.estimate.mi_bits,
            "sum_entropy_bits": self.estimate.sum_entropy_bits,
            "input_entropy_bits": self.estimate.input_entropy_bits,
            "residual_bits": self.estimate.residual_bits,
            "bias_bound_bits": self.estimate.bias_bound_bits,
        }
        header = ",".join(LEAKAGE_COLUMNS)
        row = ",".join(fmt(vals[c]) for c in LEAKAGE_COLUMNS)
        return f"{header}\n{row}\n"

    def metadata(self) -> dict:
        return {
            "version": self.version,
            "master_seed": self.master_seed,
            "h": ",".join(fmt(x) for x in self.gains.h),
            "h_e": ",".join(fmt(x) for x in self.gains.h_e),
        }


def run_leakage(cfg: SimConfig) -> LeakageRunReport:
    """Sample (input tuple, eavesdropper observation) pairs and estimate leakage.

    The aligned eavesdropper sees A * sum_k x~_k plus noise.  Noiseless
    runs enumerate the input tuples exhaustively when they fit in the
    sample budget, which removes sampling error entirely.  The default
    bin width A/10 suits noiseless runs; for noisy runs pick a width
    commensurate with the noise scale, or the plug-in bias (roughly
    occupied cells / (2 n ln 2) bits) dominates the estimate.
    """
    if cfg.leakage_samples < 1000:
        raise ParameterError(
            f"leakage sample budget must be >= 1000, got {cfg.leakage_samples}"
        )
    gains = cfg.resolve_gains()
    P = cfg.P_grid[-1]
    P_t = effective_power(gains, P)
    Q, A = select_params(P_t, cfg.K, cfg.epsilon)
    width = cfg.bin_width if cfg.bin_width is not None else A / 10.0
    M = (2 * Q + 1) ** cfg.K

    exhaustive = cfg.variance == 0 and M <= cfg.leakage_samples
    if exhaustive:
        grids = np.meshgrid(*[np.arange(-Q, Q + 1)] * cfg.K, indexing="ij")
        tuples = np.stack([gr.ravel() for gr in grids], axis=1)
        z = A * tuples.sum(axis=1).astype(float)
        # pad by repeating the exhaustive block so the estimator's sample
        # floor is met without changing the empirical distribution
        if M < 1000:
            reps = math.ceil(1000 / M)
            tuples = np.tile(tuples, (reps, 1))
            z = np.tile(z, reps)
    else:
        n = cfg.leakage_samples
        tuples = np.empty((n, cfg.K), dtype=np.int64)
        z = np.empty(n)
        sd = math.sqrt(cfg.variance)
        for b0 in range(0, n, TRIAL_BATCH):
            bs = min(TRIAL_BATCH, n - b0)
            bi = b0 // TRIAL_BATCH
            v = stream(cfg.master_seed, "leakage/input", bi).integers(
                -Q, Q + 1, size=(bs, cfg.K)
            )
            w = stream(cfg.master_seed, "leakage/noise", bi).standard_normal(bs)
            tuples[b0 : b0 + bs] = v
            z[b0 : b0 + bs] = A * v.sum(axis=1) + sd * w

    est = leakage_estimate(tuples, z, width)
    return LeakageRunReport(
        P=P,
        P_tilde=P_t,
        Q=Q,
        A=A,
        variance=cfg.variance,
        bin_width=width,
        samples=int(tuples.shape[0]),
        exhaustive=exhaustive,
        estimate=est,
        gains=gains,
        master_seed=cfg.master_seed,
    )
