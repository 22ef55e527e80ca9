"""Toy one-way function families, puzzle sampling and empirical security.

``hash_truncate`` is SHAKE-256 over a domain-separated encoding of ``(k, x)``
truncated to ``m = ceil(k**b)`` bits. ``random_table`` is a seeded random
injection {0,1}^k -> {0,1}^m (a permutation when m == k; a plain random
function when m < k), small enough to analyse exactly.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import numpy as np

from .core import BitString

KINDS = ("hash_truncate", "random_table")
RANDOM_TABLE_MAX_K = 24
_DOMAIN_TAG = b"boundedgames/owf/v1"


@lru_cache(maxsize=None)
def _ceil_root_power(k: int, b: Fraction) -> int:
    """Exact ceil(k ** b) for rational b > 0."""
    p, q = b.numerator, b.denominator
    target = k**p
    m = max(1, int(round(float(k) ** float(b))))
    while m**q < target:
        m += 1
    while m > 1 and (m - 1) ** q >= target:
        m -= 1
    return m


@dataclass(frozen=True)
class OwfInstance:
    kind: str = "random_table"
    output_len_exponent: Fraction = Fraction(1)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "output_len_exponent", Fraction(self.output_len_exponent))
        if self.kind not in KINDS:
            raise ValueError(f"unknown OWF kind {self.kind!r}")
        if self.output_len_exponent <= 0:
            raise ValueError("output length exponent must be positive")

    def output_len(self, k: int) -> int:
        return _ceil_root_power(k, self.output_len_exponent)

    def check_k(self, k: int) -> None:
        if k < 1:
            raise ValueError(f"key length {k} must be >= 1")
        if self.kind == "random_table":
            if k > RANDOM_TABLE_MAX_K:
                raise ValueError(f"random_table supports k <= {RANDOM_TABLE_MAX_K}, got {k}")
            if self.output_len(k) > 64:
                raise ValueError("random_table images are limited to 64 bits")

    def eval_int(self, k: int, x: int) -> int:
        if self.kind == "random_table":
            return int(_table(self.seed, k, self.output_len(k))[x])
        return _hash_eval(k, self.output_len(k), x)


def _hash_eval(k: int, m: int, x: int) -> int:
    nbytes = (m + 7) // 8
    data = _DOMAIN_TAG + k.to_bytes(4, "big") + x.to_bytes((k + 7) // 8, "big")
    digest = int.from_bytes(hashlib.shake_256(data).digest(nbytes), "big")
    return digest >> (8 * nbytes - m)


@lru_cache(maxsize=16)
def _table(seed: int, k: int, m: int) -> np.ndarray:
    rng = np.random.default_rng([seed, k, m])
    size = 1 << k
    if m >= k:
        high = rng.permutation(size).astype(np.uint64)
        if m == k:
            return high
        low = rng.integers(0, 1 << (m - k), size=size, dtype=np.uint64, endpoint=False)
        return (high << np.uint64(m - k)) | low
    return rng.integers(0, 1 << m, size=size, dtype=np.uint64)


@lru_cache(maxsize=16)
def _sorted_images(seed: int, k: int, m: int):
    table = _table(seed, k, m)
    if m == k:
        order = np.empty_like(table)
        order[table] = np.arange(len(table), dtype=table.dtype)
        return np.arange(len(table), dtype=table.dtype), order
    order = np.argsort(table, kind="stable")
    return table[order], order


class PreimageIndex:
    """Answers "first z < limit in lexicographic order with f(z) == image".

    Equivalent to a literal exhaustive scan; the scan's evaluation count is
    ``z + 1`` on success and ``limit`` on failure.
    """

    def __init__(self, inst: OwfInstance, k: int):
        inst.check_k(k)
        self.inst, self.k = inst, k
        self._seen: dict[int, int] = {}
        self._scanned = 0

    def first_preimage(self, image: int, limit: int) -> int | None:
        limit = min(limit, 1 << self.k)
        if self.inst.kind == "random_table":
            values, order = _sorted_images(self.inst.seed, self.k, self.inst.output_len(self.k))
            pos = int(np.searchsorted(values, np.uint64(image)))
            if pos < len(values) and int(values[pos]) == image:
                z = int(order[pos])
                return z if z < limit else None
            return None
        z = self._seen.get(image)
        if z is not None:
            return z if z < limit else None
        m = self.inst.output_len(self.k)
        while self._scanned < limit:
            x = self._scanned
            self._seen.setdefault(_hash_eval(self.k, m, x), x)
            self._scanned += 1
            if self._seen.get(image) == x:
                return x
        return None


_INDEXES: dict = {}


def preimage_index(inst: OwfInstance, k: int) -> PreimageIndex:
    key = (inst, k)
    if key not in _INDEXES:
        _INDEXES[key] = PreimageIndex(inst, k)
    return _INDEXES[key]


def owf_eval(inst: OwfInstance, x: BitString) -> BitString:
    k = len(x)
    inst.check_k(k)
    return BitString.from_int(inst.eval_int(k, x.to_int()), inst.output_len(k))


def random_bits(rng: np.random.Generator, k: int) -> int:
    nbytes = (k + 7) // 8
    return int.from_bytes(rng.bytes(nbytes), "big") >> (8 * nbytes - k)


def sample_puzzle(inst: OwfInstance, k: int, rng_seed) -> tuple[BitString, BitString]:
    """Uniform secret of length ``k`` and its image; players only ever see the image."""
    inst.check_k(k)
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    secret = BitString.from_int(random_bits(rng, k), k)
    return owf_eval(inst, secret), secret


def check_inverts(inst: OwfInstance, image: BitString, z: BitString, k: int) -> bool:
    if len(z) != k:
        raise ValueError(f"candidate has length {len(z)}, expected {k}")
    return owf_eval(inst, z) == image


def measure_security(inst: OwfInstance, k: int, inverter_budget: int, trials: int, seed: int) -> float:
    """Fraction of fresh puzzles inverted by scanning the first ``inverter_budget`` strings."""
    if inst.kind != "random_table":
        raise ValueError("measure_security needs the random_table kind")
    inst.check_k(k)
    if not 0 <= inverter_budget <= 1 << k:
        raise ValueError("inverter budget must lie in [0, 2^k]")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    m = inst.output_len(k)
    table = _table(inst.seed, k, m)
    values, order = _sorted_images(inst.seed, k, m)
    secrets = rng.integers(0, 1 << k, size=trials, dtype=np.uint64)
    images = table[secrets]
    first = order[np.searchsorted(values, images)]
    return float(np.count_nonzero(first < inverter_budget)) / trials


@dataclass(frozen=True)
class OwfSecuritySpec:
    """(s, t)-security with s(k) = 2^(k*s_exponent), t(k) = 2^(k*t_exponent)."""

    s_exponent: Fraction = Fraction(1, 10)
    t_exponent: Fraction = Fraction(1, 30)

    def __post_init__(self):
        object.__setattr__(self, "s_exponent", Fraction(self.s_exponent))
        object.__setattr__(self, "t_exponent", Fraction(self.t_exponent))
        if not 0 < self.t_exponent < self.s_exponent < 1:
            raise ValueError("need 0 < t_exponent < s_exponent < 1")

    def s(self, k: int) -> float:
        return 2.0 ** (k * float(self.s_exponent))

    def t(self, k: int) -> float:
        return 2.0 ** (k * float(self.t_exponent))

    def inverter_budget(self, k: int) -> int:
        return math.floor(self.t(k))


def golden_vectors(count_per_k: int = 3) -> list[dict]:
    """Deterministic (kind, seed, k, x_hex, image_hex) test vectors."""
    out = []
    for kind, seed, ks in (("random_table", 7, (4, 8, 12)), ("hash_truncate", 0, (4, 8, 32, 40))):
        inst = OwfInstance(kind, 1, seed)
        for k in ks:
            for j in range(count_per_k):
                x = (j * 0x9E3779B97F4A7C15 + k) % (1 << k)
                out.append(
                    {
                        "kind": kind,
                        "seed": seed,
                        "k": k,
                        "x_hex": format(x, "x"),
                        "image_hex": format(inst.eval_int(k, x), "x"),
                    }
                )
    return out


def load_golden_vectors() -> list[dict]:
    text = resources.files("boundedgames").joinpath("data/owf_golden.json").read_text()
    return json.loads(text)["vectors"]
