"""Exact rate and equivocation computations for finite-alphabet wiretap MACs.

The achievable region of a discrete memoryless multiple-access channel
with an eavesdropper is cut out by per-subset constraints
I(U_S; Y | U_{S^c}) together with one secrecy sum constraint
[I(U; Y) - I(U; Z)]^+.  Everything here works on fully enumerated joint
tables, so results are exact up to float rounding; all entropies are in
bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ParameterError, SizeCapError

JOINT_TABLE_CAP = 10_000_000
PMF_TOL = 1e-12


def _check_pmf(arr: np.ndarray, name: str, axis: int = -1) -> None:
    if np.any(arr < 0):
        raise ParameterError(f"{name} has negative entries")
    sums = arr.sum(axis=axis)
    if np.any(np.abs(sums - 1.0) > PMF_TOL):
        raise ParameterError(f"{name} rows must sum to 1 within {PMF_TOL}")


@dataclass(frozen=True)
class DiscreteMACSpec:
    """Finite-alphabet K-user wiretap MAC with auxiliary inputs U_k.

    The joint law is fixed to prod_k P(u_k) P(x_k|u_k) times the channel
    P(y,z|x_1..x_K).  ``p_yz_given_x`` has shape (*x_sizes, y, z) and each
    ``p_x_given_u[k]`` has shape (|U_k|, |X_k|).
    """

    K: int
    p_u: tuple[np.ndarray, ...]
    p_x_given_u: tuple[np.ndarray, ...]
    p_yz_given_x: np.ndarray

    def __post_init__(self):
        if self.K < 1:
            raise ParameterError(f"K must be >= 1, got {self.K}")
        if len(self.p_u) != self.K or len(self.p_x_given_u) != self.K:
            raise ParameterError("need one P(u_k) and one P(x_k|u_k) per user")
        p_u = tuple(np.asarray(p, dtype=float) for p in self.p_u)
        p_xu = tuple(np.asarray(p, dtype=float) for p in self.p_x_given_u)
        chan = np.asarray(self.p_yz_given_x, dtype=float)
        object.__setattr__(self, "p_u", p_u)
        object.__setattr__(self, "p_x_given_u", p_xu)
        object.__setattr__(self, "p_yz_given_x", chan)
        if chan.ndim != self.K + 2:
            raise ParameterError(
                f"channel table must have {self.K + 2} axes (x_1..x_K, y, z)"
            )
        for k in range(self.K):
            _check_pmf(p_u[k], f"P(u_{k + 1})")
            if p_xu[k].ndim != 2 or p_xu[k].shape[0] != p_u[k].size:
                raise ParameterError(f"P(x_{k + 1}|u_{k + 1}) shape mismatch")
            _check_pmf(p_xu[k], f"P(x_{k + 1}|u_{k + 1})")
            if chan.shape[k] != p_xu[k].shape[1]:
                raise ParameterError(f"channel axis {k} does not match |X_{k + 1}|")
        flat = chan.reshape(-1, chan.shape[-2] * chan.shape[-1])
        _check_pmf(flat, "P(y,z|x)")
        if chan.size > JOINT_TABLE_CAP:
            raise SizeCapError(f"channel table has {chan.size} entries, cap {JOINT_TABLE_CAP}")

    @property
    def u_sizes(self) -> tuple[int, ...]:
        return tuple(p.size for p in self.p_u)

    @property
    def y_size(self) -> int:
        return self.p_yz_given_x.shape[-2]

    @property
    def z_size(self) -> int:
        return self.p_yz_given_x.shape[-1]

    def joint_uyz(self) -> np.ndarray:
        """Joint P(u_1..u_K, y, z) with X marginalized out."""
        size = math.prod(self.u_sizes) * self.y_size * self.z_size
        if size > JOINT_TABLE_CAP:
            raise SizeCapError(f"joint table needs {size} entries, cap {JOINT_TABLE_CAP}")
        t = self.p_yz_given_x
        for k in range(self.K):
            # contract x_k (axis k of the running table) against P(x_k|u_k)
            t = np.tensordot(self.p_x_given_u[k], t, axes=(1, k))
        # axes are now (u_K, ..., u_1, y, z); restore user order
        perm = tuple(range(self.K - 1, -1, -1)) + (self.K, self.K + 1)
        t = np.transpose(t, perm)
        weight = self.p_u[0]
        for k in range(1, self.K):
            weight = np.multiply.outer(weight, self.p_u[k])
        return t * weight[..., None, None]


@dataclass(frozen=True)
class RateRegion:
    """Subset constraints plus the secrecy sum bound, all in bits.

    ``constraints`` lists (S, bound) for every nonempty proper subset S of
    {1..K}, ordered by subset bitmask (bit k-1 <=> user k).
    """

    K: int
    constraints: tuple[tuple[frozenset[int], float], ...]
    sum_bound: float


def subset_mask(subset: frozenset[int]) -> int:
    return sum(1 << (k - 1) for k in subset)


def entropy_bits(p: np.ndarray) -> float:
    """Shannon entropy of a pmf in bits, with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float).ravel()
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def mutual_information(joint: np.ndarray) -> float:
    """I(A;B) in bits from a 2-way joint pmf table."""
    joint = np.asarray(joint, dtype=float)
    if joint.ndim != 2:
        raise ParameterError(f"joint table must be 2-D, got {joint.ndim}-D")
    if np.any(joint < 0):
        raise ParameterError("joint table has negative entries")
    total = joint.sum()
    if abs(total - 1.0) > PMF_TOL:
        raise ParameterError(f"joint table sums to {total}, not 1 within {PMF_TOL}")
    val = (
        entropy_bits(joint.sum(axis=1))
        + entropy_bits(joint.sum(axis=0))
        - entropy_bits(joint)
    )
    return max(0.0, val)


def achievable_region(spec: DiscreteMACSpec) -> RateRegion:
    """Rate region of the wiretap MAC for the given input distributions."""
    joint = spec.joint_uyz()
    K = spec.K
    joint_uy = joint.sum(axis=-1)  # (u_1..u_K, y)
    joint_uz = joint.sum(axis=-2)  # (u_1..u_K, z)

    h_u_all = entropy_bits(joint_uy.sum(axis=-1))
    h_uy_all = entropy_bits(joint_uy)

    constraints = []
    for mask in range(1, 2**K - 1):
        # I(U_S; Y | U_C) = H(U) + H(U_C, Y) - H(U_C) - H(U, Y)
        s_axes = tuple(k for k in range(K) if (mask >> k) & 1)
        h_c = entropy_bits(joint_uy.sum(axis=s_axes + (-1,)))
        h_cy = entropy_bits(joint_uy.sum(axis=s_axes))
        bound = max(0.0, h_u_all + h_cy - h_c - h_uy_all)
        subset = frozenset(k + 1 for k in range(K) if (mask >> k) & 1)
        constraints.append((subset, bound))

    i_uy = h_u_all + entropy_bits(joint_uy.sum(axis=tuple(range(K)))) - h_uy_all
    i_uz = (
        h_u_all
        + entropy_bits(joint_uz.sum(axis=tuple(range(K))))
        - entropy_bits(joint_uz)
    )
    return RateRegion(
        K=K, constraints=tuple(constraints), sum_bound=max(0.0, i_uy - i_uz)
    )


def region_contains(region: RateRegion, rates: Sequence[float], slack: float = 1e-9) -> bool:
    """Membership test with a small numerical slack on every constraint."""
    rates = [float(r) for r in rates]
    if len(rates) != region.K:
        raise ParameterError(f"need {region.K} rates, got {len(rates)}")
    if any(r < 0 for r in rates):
        raise ParameterError("rates must be nonnegative")
    for subset, bound in region.constraints:
        if sum(rates[k - 1] for k in subset) > bound + slack:
            return False
    return sum(rates) <= region.sum_bound + slack


def sum_entropy(K: int, Q: int) -> float:
    """Exact entropy in bits of the sum of K i.i.d. uniforms on [-Q, Q].

    Composition counts come from K-1 exact integer convolutions, so the
    only rounding is in the final log2.
    """
    if K < 1:
        raise ParameterError(f"K must be >= 1, got {K}")
    if Q < 0:
        raise ParameterError(f"Q must be >= 0, got {Q}")
    support = 2 * K * Q + 1
    if support > JOINT_TABLE_CAP:
        raise SizeCapError(f"sum support {support} exceeds cap {JOINT_TABLE_CAP}")
    if Q == 0:
        return 0.0
    width = 2 * Q + 1
    counts = [1] * width
    for _ in range(K - 1):
        new = [0] * (len(counts) + width - 1)
        for i, c in enumerate(counts):
            for j in range(width):
                new[i + j] += c
        counts = new
    total = width**K
    log_total = math.log2(total)
    return log_total - sum(c * math.log2(c) for c in counts if c > 1) / total


def sum_rate_lower_bound(K: int, Q: int, P_e: float) -> float:
    """Secrecy sum-rate lower bound in bits per channel use.

    max(0, K log2(2Q+1) - log2(2KQ+1) - 1 - P_e K log2(2Q+1)); the Fano
    penalty reads the joint input alphabet of size (2Q+1)^K.
    """
    if K < 1:
        raise ParameterError(f"K must be >= 1, got {K}")
    if Q < 1:
        raise ParameterError(f"Q must be >= 1, got {Q}")
    if not 0 <= P_e <= 1:
        raise ParameterError(f"P_e must be in [0,1], got {P_e}")
    per_user = math.log2(2 * Q + 1)
    raw = K * per_user - math.log2(2 * K * Q + 1) - 1.0 - P_e * K * per_user
    return max(0.0, raw)


def sdof_limit(K: int, epsilon: float) -> float:
    """Secure degrees-of-freedom limit (K-1)(1-eps)/(K+eps)."""
    if K < 2:
        raise ParameterError(f"K must be >= 2, got {K}")
    if not 0 <= epsilon < 1:
        raise ParameterError(f"epsilon must be in [0,1), got {epsilon}")
    return (K - 1) * (1.0 - epsilon) / (K + epsilon)


class SlopeFit(NamedTuple):
    slope: float
    intercept: float
    residual: float  # RMS deviation from the fitted line


def sdof_fit(points: Sequence[tuple[float, float]]) -> SlopeFit:
    """Least-squares slope of sum rate against (1/2) log2 P."""
    if len(points) < 2:
        raise ParameterError(f"need at least 2 points, got {len(points)}")
    P = np.array([p for p, _ in points], dtype=float)
    R = np.array([r for _, r in points], dtype=float)
    if np.any(P <= 1):
        raise ParameterError("every P must exceed 1")
    if np.unique(P).size < 2:
        raise ParameterError("degenerate fit: all P values identical")
    x = 0.5 * np.log2(P)
    design = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, R, rcond=None)
    resid = R - (slope * x + intercept)
    return SlopeFit(
        slope=float(slope),
        intercept=float(intercept),
        residual=float(np.sqrt(np.mean(resid**2))),
    )


@dataclass(frozen=True)
class LeakageReport:
    """Plug-in leakage estimate with its exact noiseless references."""

    mi_bits: float
    sum_entropy_bits: float  # exact H(sum of inputs) for the inferred (K, Q)
    input_entropy_bits: float  # K log2(2Q+1)
    residual_bits: float  # input entropy minus sum entropy
    bias_bound_bits: float  # (occupied joint cells - 1) / (2 n ln 2)
    n_samples: int
    n_bins: int
    K: int
    Q: int


def leakage_estimate(
    x_tuples: np.ndarray, z: np.ndarray, bin_width: float, min_samples: int = 1000
) -> LeakageReport:
    """Plug-in mutual information between input tuples and quantized z.

    ``x_tuples`` is (n, K) integers, ``z`` is (n,) reals quantized to bins
    of the given width.  The estimator carries no bias correction; the
    report includes the standard first-order bias bound instead.
    """
    x_tuples = np.asarray(x_tuples)
    z = np.asarray(z, dtype=float)
    if x_tuples.ndim != 2 or z.ndim != 1 or x_tuples.shape[0] != z.size:
        raise ParameterError("need (n, K) tuples aligned with n observations")
    n = z.size
    if n < min_samples:
        raise ParameterError(f"need at least {min_samples} samples, got {n}")
    if not bin_width > 0:
        raise ParameterError(f"bin width must be positive, got {bin_width}")

    if math.isinf(bin_width):
        bins = np.zeros(n, dtype=np.int64)
    else:
        bins = np.floor(z / bin_width).astype(np.int64)

    _, tuple_ids = np.unique(x_tuples, axis=0, return_inverse=True)
    _, bin_ids = np.unique(bins, return_inverse=True)
    n_inputs = int(tuple_ids.max()) + 1
    n_bins = int(bin_ids.max()) + 1
    counts = np.zeros((n_inputs, n_bins))
    np.add.at(counts, (tuple_ids, bin_ids), 1.0)
    mi = mutual_information(counts / n)

    K = x_tuples.shape[1]
    Q = int(np.abs(x_tuples).max())
    h_sum = sum_entropy(K, Q)
    h_in = K * math.log2(2 * Q + 1)
    occupied = int(np.count_nonzero(counts))
    return LeakageReport(
        mi_bits=mi,
        sum_entropy_bits=h_sum,
        input_entropy_bits=h_in,
        residual_bits=h_in - h_sum,
        bias_bound_bits=(occupied - 1) / (2.0 * n * math.log(2.0)),
        n_samples=n,
        n_bins=n_bins,
        K=K,
        Q=Q,
    )


def load_mac_spec(path: str) -> DiscreteMACSpec:
    """Read a DiscreteMACSpec from a key = value text file.

    Required keys: k, u_sizes, x_sizes, y_size, z_size, p_u_<k>,
    p_x_given_u_<k> (row-major over (u_k, x_k)) and p_yz_given_x
    (row-major over (x_1, ..., x_K, y, z)).  '#' starts a comment.
    """
    entries: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected 'key = value'")
            key, val = line.split("=", 1)
            key = key.strip()
            if key in entries:
                raise ParameterError(f"{path}:{lineno}: duplicate key {key!r}")
            entries[key] = val.strip()

    def take(key: str) -> str:
        if key not in entries:
            raise ParameterError(f"{path}: missing required key {key!r}")
        return entries.pop(key)

    K = int(take("k"))
    u_sizes = [int(t) for t in take("u_sizes").split()]
    x_sizes = [int(t) for t in take("x_sizes").split()]
    y_size = int(take("y_size"))
    z_size = int(take("z_size"))
    if len(u_sizes) != K or len(x_sizes) != K:
        raise ParameterError(f"{path}: u_sizes/x_sizes must list {K} sizes")

    p_u = []
    p_xu = []
    for k in range(1, K + 1):
        p_u.append(np.array([float(t) for t in take(f"p_u_{k}").split()]))
        flat = np.array([float(t) for t in take(f"p_x_given_u_{k}").split()])
        p_xu.append(flat.reshape(u_sizes[k - 1], x_sizes[k - 1]))
    chan_flat = np.array([float(t) for t in take("p_yz_given_x").split()])
    chan = chan_flat.reshape(tuple(x_sizes) + (y_size, z_size))
    if entries:
        raise ParameterError(f"{path}: unknown keys {sorted(entries)}")
    return DiscreteMACSpec(K=K, p_u=tuple(p_u), p_x_given_u=tuple(p_xu), p_yz_given_x=chan)
