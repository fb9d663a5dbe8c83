"""Random-binning codec over integer sequences.

Each user owns a table of B*L length-n sequences drawn i.i.d. uniform
over [-Q, Q]^n (duplicates allowed, as in random coding) and shuffled
into B equal-size bins of L sequences.  A message is a bin index; the
stochastic encoder transmits a uniformly chosen member of its bin, and
the receiver recovers the bin by exact table lookup after hard decoding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .constellation import ReceivedConstellation
from .errors import (
    AmbiguityError,
    ParameterError,
    RateInfeasibleError,
    SizeCapError,
)
from .rng import stream

OVERSAMPLING_FACTOR = 16


class DuplicateStats(NamedTuple):
    total_sequences: int
    distinct_sequences: int
    cross_bin_duplicates: int  # distinct sequences present in more than one bin


@dataclass(frozen=True)
class Codebook:
    """Binned random code for one user: table has shape (B, L, n)."""

    n: int
    Q: int
    B: int
    L: int
    seed: int
    user_k: int
    table: np.ndarray
    _lookup: dict = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.table.shape != (self.B, self.L, self.n):
            raise ParameterError(f"table shape {self.table.shape} != (B, L, n)")
        if np.any(np.abs(self.table) > self.Q):
            raise ParameterError(f"table contains symbols outside [-{self.Q}, {self.Q}]")
        # first-match lookup: scan bins in order, slots in order within a bin
        lookup: dict[bytes, int] = {}
        for b in range(self.B):
            for l in range(self.L):
                key = self.table[b, l].tobytes()
                lookup.setdefault(key, b)
        object.__setattr__(self, "_lookup", lookup)

    def bin_of(self, sequence: np.ndarray) -> int | None:
        """Bin of the first exact table match, or None if absent."""
        seq = np.ascontiguousarray(sequence, dtype=self.table.dtype)
        if seq.shape != (self.n,):
            raise ParameterError(f"sequence length {seq.shape} != ({self.n},)")
        return self._lookup.get(seq.tobytes())

    def duplicate_stats(self) -> DuplicateStats:
        flat = self.table.reshape(self.B * self.L, self.n)
        uniq, inverse = np.unique(flat, axis=0, return_inverse=True)
        bins = np.repeat(np.arange(self.B), self.L)
        cross = 0
        for u in range(uniq.shape[0]):
            owners = np.unique(bins[inverse == u])
            if owners.size > 1:
                cross += 1
        return DuplicateStats(
            total_sequences=self.B * self.L,
            distinct_sequences=uniq.shape[0],
            cross_bin_duplicates=cross,
        )


def build_codebook(n: int, Q: int, B: int, L: int, seed, user_k: int = 0) -> Codebook:
    """Draw B*L i.i.d. uniform sequences and shuffle them into B bins of L.

    The bin assignment is a seeded random permutation, so every bin holds
    exactly L sequences and every message stays encodable.
    """
    if n < 1 or Q < 1 or B < 1 or L < 1:
        raise ParameterError(f"need n, Q, B, L >= 1, got {(n, Q, B, L)}")
    max_size = OVERSAMPLING_FACTOR * (2 * Q + 1) ** n
    if B * L > max_size:
        raise RateInfeasibleError(
            f"B*L = {B * L} exceeds supported maximum {max_size} for n={n}, Q={Q}"
        )
    rng = stream(seed, "codebook/sequences", user_k)
    seqs = rng.integers(-Q, Q + 1, size=(B * L, n), dtype=np.int64)
    perm = stream(seed, "codebook/binning", user_k).permutation(B * L)
    table = seqs[perm].reshape(B, L, n)
    entropy = seed.entropy if isinstance(seed, np.random.SeedSequence) else int(seed)
    return Codebook(n=n, Q=Q, B=B, L=L, seed=entropy, user_k=user_k, table=table)


def encode(cb: Codebook, w: int, seed) -> np.ndarray:
    """Transmit sequence for message w: a uniform draw from bin w."""
    if not 0 <= w < cb.B:
        raise ParameterError(f"message {w} out of range [0, {cb.B})")
    if cb.L == 1:
        return cb.table[w, 0].copy()
    slot = int(stream(seed, "encode", cb.user_k, w).integers(0, cb.L))
    return cb.table[w, slot].copy()


def scale_to_channel(x_tilde: np.ndarray, A: float, h_e_k: float) -> np.ndarray:
    """Channel input A * x_tilde / h_e_k (pre-inverts the eavesdropper gain)."""
    if h_e_k == 0:
        raise ParameterError("eavesdropper gain is zero")
    return A * np.asarray(x_tilde, dtype=float) / h_e_k


def hard_decode(y: np.ndarray, rc: ReceivedConstellation) -> np.ndarray:
    """Per-sample nearest constellation point, returned as symbol tuples.

    Output is an (n, K) integer array.  Distance ties go to the smaller
    point value.
    """
    if not rc.gamma_holds:
        raise AmbiguityError(
            f"cannot hard-decode: gamma status is {rc.gamma.value}"
        )
    if rc.decomposition is None:
        raise SizeCapError("constellation decompositions were not materialized")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    pts = rc.points
    if pts.size == 1:
        return np.tile(rc.decomposition[0], (y.size, 1))
    idx = np.clip(np.searchsorted(pts, y), 1, pts.size - 1)
    take_left = (y - pts[idx - 1]) <= (pts[idx] - y)
    sel = np.where(take_left, idx - 1, idx)
    return rc.decomposition[sel]


def decode_messages(
    decoded: Sequence[np.ndarray], codebooks: Sequence[Codebook]
) -> list[int | None]:
    """Bin indices recovered from hard-decoded sequences, one per user.

    A sequence absent from its user's table yields None (a block decoding
    failure to be counted by the caller, not an exception).
    """
    if len(decoded) != len(codebooks):
        raise ParameterError(
            f"{len(decoded)} sequences for {len(codebooks)} codebooks"
        )
    return [cb.bin_of(np.asarray(seq)) for seq, cb in zip(decoded, codebooks)]


CODEBOOK_FORMAT = "secmac-codebook v1"


def save_codebook(cb: Codebook, path: str) -> None:
    """Write the table in the versioned textual format (one sequence per line)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            f"{CODEBOOK_FORMAT} n={cb.n} Q={cb.Q} B={cb.B} L={cb.L} "
            f"seed={cb.seed} user={cb.user_k}\n"
        )
        for b in range(cb.B):
            for l in range(cb.L):
                fh.write(" ".join(str(int(v)) for v in cb.table[b, l]) + "\n")


def load_codebook(path: str) -> Codebook:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if not header.startswith(CODEBOOK_FORMAT):
            raise ParameterError(f"{path}: unrecognized codebook header {header!r}")
        fields = dict(
            tok.split("=", 1) for tok in header[len(CODEBOOK_FORMAT) :].split()
        )
        try:
            n, Q, B, L = (int(fields[k]) for k in ("n", "Q", "B", "L"))
            seed, user_k = int(fields["seed"]), int(fields["user"])
        except KeyError as exc:
            raise ParameterError(f"{path}: missing header field {exc}") from None
        rows = []
        for lineno, line in enumerate(fh, 2):
            line = line.strip()
            if not line:
                continue
            rows.append([int(tok) for tok in line.split()])
        table = np.array(rows, dtype=np.int64)
        if table.shape != (B * L, n):
            raise ParameterError(
                f"{path}: expected {B * L} sequences of length {n}, got {table.shape}"
            )
    return Codebook(
        n=n, Q=Q, B=B, L=L, seed=seed, user_k=user_k, table=table.reshape(B, L, n)
    )
