"""Signatures, extended signatures and interlacing.

A signature of length N is a weakly decreasing integer tuple
``lam[0] >= lam[1] >= ... >= lam[N-1]``.  It labels the N-point
configuration ``a(k) = lam[N-k] + k - 1`` (k = 1..N) in Z.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence


class SignatureError(ValueError):
    pass


def _as_tuple(parts: Sequence[int]) -> tuple[int, ...]:
    out = tuple(int(p) for p in parts)
    for p, p0 in zip(out, parts):
        if p != p0:
            raise SignatureError(f"non-integer part {p0!r}")
    return out


@dataclass(frozen=True, order=True)
class Signature:
    parts: tuple[int, ...] = ()

    def __post_init__(self):
        parts = _as_tuple(self.parts)
        object.__setattr__(self, "parts", parts)
        for a, b in zip(parts, parts[1:]):
            if a < b:
                raise SignatureError(f"signature must be weakly decreasing: {parts}")

    @classmethod
    def zero(cls, n: int) -> "Signature":
        return cls((0,) * n)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    @property
    def size(self) -> int:
        """|lam|, the sum of all parts (may be negative)."""
        return sum(self.parts)

    def shifted(self, c: int) -> "Signature":
        return Signature(tuple(p + c for p in self.parts))

    def to_string(self) -> str:
        return ",".join(str(p) for p in self.parts)

    @classmethod
    def parse(cls, text: str) -> "Signature":
        text = text.strip().strip("()")
        if not text:
            return cls(())
        return cls(tuple(int(tok) for tok in text.split(",")))

    def __str__(self) -> str:
        return "(" + self.to_string() + ")"


@dataclass(frozen=True)
class ExtendedSignature:
    """``n_infinite`` leading +inf coordinates followed by a finite signature.

    The class index ``k = len(finite_parts)`` selects the block GT_N^(k) of
    the extended level.
    """

    finite_parts: Signature
    n_infinite: int = 0

    def __post_init__(self):
        if not isinstance(self.finite_parts, Signature):
            object.__setattr__(self, "finite_parts", Signature(tuple(self.finite_parts)))
        if self.n_infinite < 0:
            raise SignatureError("n_infinite must be >= 0")

    @property
    def length(self) -> int:
        return self.n_infinite + len(self.finite_parts)

    @property
    def k(self) -> int:
        return len(self.finite_parts)

    def to_string(self) -> str:
        toks = ["inf"] * self.n_infinite + [str(p) for p in self.finite_parts]
        return ",".join(toks)

    @classmethod
    def parse(cls, text: str) -> "ExtendedSignature":
        toks = [t.strip() for t in text.strip().strip("()").split(",") if t.strip()]
        n_inf = 0
        while n_inf < len(toks) and toks[n_inf].lower() in ("inf", "+inf"):
            n_inf += 1
        rest = toks[n_inf:]
        if any(t.lower() in ("inf", "+inf") for t in rest):
            raise SignatureError("infinite coordinates must lead")
        return cls(Signature(tuple(int(t) for t in rest)), n_inf)


@dataclass(frozen=True)
class PointConfig:
    points: tuple[int, ...] = ()

    def __post_init__(self):
        pts = _as_tuple(self.points)
        object.__setattr__(self, "points", pts)
        for a, b in zip(pts, pts[1:]):
            if a >= b:
                raise SignatureError(f"configuration must be strictly increasing: {pts}")

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, x) -> bool:
        return x in self.points


def as_signature(lam) -> Signature:
    if isinstance(lam, Signature):
        return lam
    return Signature(tuple(lam))


def signature_to_config(lam) -> PointConfig:
    lam = as_signature(lam)
    n = len(lam)
    return PointConfig(tuple(lam[n - k] + k - 1 for k in range(1, n + 1)))


def config_to_signature(config) -> Signature:
    if not isinstance(config, PointConfig):
        config = PointConfig(tuple(config))
    pts = config.points
    n = len(pts)
    return Signature(tuple(pts[n - i] - (n - i) for i in range(1, n + 1)))


def interlaces(mu, lam) -> bool:
    """True iff ``mu`` (length N-1) interlaces ``lam`` (length N) from below."""
    mu, lam = as_signature(mu), as_signature(lam)
    if len(lam) != len(mu) + 1:
        raise SignatureError(
            f"interlacing needs lengths N-1 and N, got {len(mu)} and {len(lam)}"
        )
    return all(lam[i] >= mu[i] >= lam[i + 1] for i in range(len(mu)))


def enumerate_interlacing_below(lam) -> Iterator[Signature]:
    """All mu with mu < lam (interlacing), in lexicographic order."""
    lam = as_signature(lam)
    if len(lam) == 0:
        raise SignatureError("the empty signature has no level below it")
    ranges = [range(lam[i + 1], lam[i] + 1) for i in range(len(lam) - 1)]
    for parts in itertools.product(*ranges):
        yield Signature(parts)


def count_interlacing_below(lam) -> int:
    lam = as_signature(lam)
    out = 1
    for a, b in zip(lam.parts, lam.parts[1:]):
        out *= a - b + 1
    return out


def signatures_in_box(n: int, lo: int, hi: int) -> Iterator[Signature]:
    """All length-n signatures with parts in [lo, hi]."""
    for parts in itertools.combinations_with_replacement(range(hi, lo - 1, -1), n):
        yield Signature(parts)
