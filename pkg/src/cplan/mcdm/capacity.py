"""Capacities (fuzzy measures) over a criteria set, with Moebius, Shapley and
interaction analysis.

A capacity assigns every subset of the criteria a value in [0,1], is zero on
the empty set, one on the full set, and monotone under inclusion. Subsets are
encoded internally as bitmasks over the criteria order, so a capacity on n
criteria is a flat tuple of 2**n values indexed by mask.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from ..errors import DomainError, ValidationFailed
from .ahp import PriorityVector

_BOUNDARY_TOL = 1e-9
_MONOTONE_TOL = 1e-12

DEFAULT_CRITERIA_NAMES = ("Risk", "Cost", "Time")

SUBSET_KEY_SEPARATOR = ","


@dataclass(frozen=True)
class CriteriaSet:
    """Ordered, unique criterion identifiers; order is fixed for a session."""

    names: tuple[str, ...] = DEFAULT_CRITERIA_NAMES

    def __post_init__(self) -> None:
        names = tuple(str(x) for x in self.names)
        if not names:
            raise ValidationFailed("criteria set must not be empty")
        if len(set(names)) != len(names):
            raise ValidationFailed("criterion identifiers must be unique")
        if len(names) > 9:
            raise ValidationFailed("at most 9 criteria are supported")
        for name in names:
            if not name:
                raise ValidationFailed("criterion identifiers must be non-empty")
            if SUBSET_KEY_SEPARATOR in name:
                raise ValidationFailed(f"criterion identifier {name!r} must not contain {SUBSET_KEY_SEPARATOR!r}")
        object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ValidationFailed(f"unknown criterion {name!r}; expected one of {list(self.names)}") from None

    def mask_of(self, subset: Iterable[str]) -> int:
        mask = 0
        for name in subset:
            mask |= 1 << self.index(name)
        return mask

    def subset_of(self, mask: int) -> tuple[str, ...]:
        return tuple(name for i, name in enumerate(self.names) if mask & (1 << i))

    def key_of(self, mask: int) -> str:
        """Canonical string key for a subset: names joined in criteria order."""
        return SUBSET_KEY_SEPARATOR.join(self.subset_of(mask))

    def mask_of_key(self, key: str) -> int:
        if key == "":
            return 0
        return self.mask_of(key.split(SUBSET_KEY_SEPARATOR))


DEFAULT_CRITERIA = CriteriaSet()


def _check_values(criteria: CriteriaSet, values: tuple[float, ...]) -> None:
    n = criteria.n
    size = 1 << n
    if len(values) != size:
        raise ValidationFailed(f"expected {size} subset values for {n} criteria, got {len(values)}")
    if any(not math.isfinite(v) for v in values):
        raise ValidationFailed("subset values must be finite")


@dataclass(frozen=True)
class Capacity:
    """Monotone normalized set function over a criteria set."""

    criteria: CriteriaSet
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        _check_values(self.criteria, values)
        full = len(values) - 1
        if abs(values[0]) > _BOUNDARY_TOL:
            raise DomainError(f"capacity of the empty set is {values[0]!r}, expected 0")
        if abs(values[full] - 1.0) > _BOUNDARY_TOL:
            raise DomainError(f"capacity of the full criteria set is {values[full]!r}, expected 1")
        # Snap boundaries so downstream arithmetic sees exact 0 and 1.
        values = (0.0,) + values[1:full] + (1.0,)
        for mask in range(1, full + 1):
            for i in range(self.criteria.n):
                bit = 1 << i
                if mask & bit:
                    sub = mask & ~bit
                    if values[sub] > values[mask] + _MONOTONE_TOL:
                        raise DomainError(
                            "capacity is not monotone: "
                            f"value({self.criteria.key_of(sub) or 'empty set'})={values[sub]!r} exceeds "
                            f"value({self.criteria.key_of(mask)})={values[mask]!r}"
                        )
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.criteria.n

    def value(self, subset: Iterable[str]) -> float:
        return self.values[self.criteria.mask_of(subset)]

    def value_of_mask(self, mask: int) -> float:
        return self.values[mask]

    def to_mapping(self) -> dict[str, float]:
        """Subset-key -> value mapping (the serialized form)."""
        return {self.criteria.key_of(mask): self.values[mask] for mask in range(len(self.values))}

    @classmethod
    def from_mapping(cls, criteria: CriteriaSet, mapping: Mapping[str, float]) -> "Capacity":
        """Build from subset-key -> value; every subset must be present exactly once."""
        size = 1 << criteria.n
        values = [None] * size
        for key, v in mapping.items():
            mask = criteria.mask_of_key(str(key))
            if values[mask] is not None:
                raise ValidationFailed(f"subset {key!r} appears more than once")
            values[mask] = float(v)
        missing = [criteria.key_of(m) or "(empty set)" for m in range(size) if values[m] is None]
        if missing:
            raise ValidationFailed(f"capacity mapping is missing subsets: {missing}")
        return cls(criteria, tuple(values))

    @classmethod
    def additive(cls, criteria: CriteriaSet, weights: Iterable[float]) -> "Capacity":
        """Additive capacity from singleton weights (must sum to 1)."""
        w = [float(x) for x in weights]
        if len(w) != criteria.n:
            raise ValidationFailed(f"expected {criteria.n} singleton weights, got {len(w)}")
        if any(x < 0 for x in w):
            raise ValidationFailed("singleton weights must be non-negative")
        if abs(sum(w) - 1.0) > _BOUNDARY_TOL:
            raise ValidationFailed(f"singleton weights sum to {sum(w)!r}, expected 1")
        values = []
        for mask in range(1 << criteria.n):
            values.append(sum(w[i] for i in range(criteria.n) if mask & (1 << i)))
        return cls(criteria, tuple(values))

    @classmethod
    def minimum(cls, criteria: CriteriaSet) -> "Capacity":
        """Capacity that is 0 on every proper subset; its Choquet integral is min."""
        size = 1 << criteria.n
        return cls(criteria, tuple(0.0 if mask != size - 1 else 1.0 for mask in range(size)))

    @classmethod
    def maximum(cls, criteria: CriteriaSet) -> "Capacity":
        """Capacity that is 1 on every non-empty subset; its Choquet integral is max."""
        size = 1 << criteria.n
        return cls(criteria, tuple(0.0 if mask == 0 else 1.0 for mask in range(size)))


@dataclass(frozen=True)
class MobiusRepresentation:
    """Moebius masses of a capacity; the zeta transform recovers the capacity.

    Masses are held as exact rationals so that the zeta transform of a
    Moebius transform reproduces the original capacity bit for bit; every
    float is an exact binary rational, so no precision is invented.
    """

    criteria: CriteriaSet
    masses: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        try:
            masses = tuple(Fraction(v) for v in self.masses)
        except (TypeError, ValueError) as exc:
            raise ValidationFailed(f"Moebius masses must be numbers: {exc}") from exc
        size = 1 << self.criteria.n
        if len(masses) != size:
            raise ValidationFailed(f"expected {size} Moebius masses for {self.criteria.n} criteria, got {len(masses)}")
        if masses[0] != 0:
            raise DomainError(f"Moebius mass of the empty set is {float(masses[0])!r}, expected 0")
        object.__setattr__(self, "masses", masses)

    def mass(self, subset: Iterable[str]) -> float:
        return float(self.masses[self.criteria.mask_of(subset)])

    def to_mapping(self) -> dict[str, float]:
        return {self.criteria.key_of(mask): float(self.masses[mask]) for mask in range(len(self.masses))}

    @classmethod
    def from_mapping(cls, criteria: CriteriaSet, mapping: Mapping[str, float]) -> "MobiusRepresentation":
        """Build from subset-key -> mass; omitted subsets default to mass 0."""
        size = 1 << criteria.n
        masses = [Fraction(0)] * size
        for key, v in mapping.items():
            masses[criteria.mask_of_key(str(key))] = Fraction(v)
        return cls(criteria, tuple(masses))


def _submasks(mask: int):
    """All submasks of ``mask``, including 0 and mask itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def mobius(cap: Capacity) -> MobiusRepresentation:
    """Moebius transform: m(S) = sum over T <= S of (-1)^|S\\T| * cap(T).

    Computed in exact rational arithmetic, so the transform is invertible
    without rounding error.
    """
    size = len(cap.values)
    exact = [Fraction(v) for v in cap.values]
    masses = [Fraction(0)] * size
    for mask in range(size):
        bits_mask = bin(mask).count("1")
        total = Fraction(0)
        for sub in _submasks(mask):
            if (bits_mask - bin(sub).count("1")) % 2:
                total -= exact[sub]
            else:
                total += exact[sub]
        masses[mask] = total
    return MobiusRepresentation(cap.criteria, tuple(masses))


def zeta(mr: MobiusRepresentation) -> Capacity:
    """Zeta transform: cap(S) = sum over T <= S of m(T).

    Raises :class:`DomainError` (naming the offending subset pair) when the
    induced set function is not a valid capacity.
    """
    size = len(mr.masses)
    values = [0.0] * size
    for mask in range(size):
        values[mask] = float(sum((mr.masses[sub] for sub in _submasks(mask)), Fraction(0)))
    return Capacity(mr.criteria, tuple(values))


def shapley(cap: Capacity) -> PriorityVector:
    """Shapley importance of each criterion; components sum to 1."""
    n = cap.n
    fact = [math.factorial(k) for k in range(n + 1)]
    phi = [0.0] * n
    for i in range(n):
        bit = 1 << i
        for mask in range(len(cap.values)):
            if mask & bit:
                continue
            s = bin(mask).count("1")
            weight = fact[s] * fact[n - s - 1] / fact[n]
            phi[i] += weight * (cap.values[mask | bit] - cap.values[mask])
    total = sum(phi)
    return PriorityVector(tuple(x / total for x in phi), method="shapley")


def interaction_index(cap: Capacity, pair: tuple[str, str]) -> float:
    """Shapley interaction index of a criterion pair, in [-1, 1].

    Positive values indicate synergy (the pair is worth more than its parts),
    negative values redundancy.
    """
    a, b = pair
    i = cap.criteria.index(a)
    j = cap.criteria.index(b)
    if i == j:
        raise ValidationFailed(f"interaction index requires two distinct criteria, got {a!r} twice")
    n = cap.n
    fact = [math.factorial(k) for k in range(n + 1)]
    bit_i, bit_j = 1 << i, 1 << j
    total = 0.0
    for mask in range(len(cap.values)):
        if mask & (bit_i | bit_j):
            continue
        s = bin(mask).count("1")
        weight = fact[s] * fact[n - s - 2] / fact[n - 1]
        total += weight * (
            cap.values[mask | bit_i | bit_j] - cap.values[mask | bit_i] - cap.values[mask | bit_j] + cap.values[mask]
        )
    return total
