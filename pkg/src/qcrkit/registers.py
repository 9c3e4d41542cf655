"""Register bookkeeping: who holds which qudit, and the index sets.

A multipartite state is laid out as an ordered list of registers, each owned
by a party. The dealer party "D" holds one info register plus any number of
shield registers; each player holds one info register and optional shields;
purifying environments are registers of kind "env". Layout order fixes the
tensor order of every array in the package.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

DEALER = "D"
ENV_PARTY = "E"
KINDS = ("info", "shield", "env")


@dataclass(frozen=True)
class Subsystem:
    """One register: a label unique within its layout, an owner, a role, a dimension."""

    label: str
    party: str
    kind: str
    dim: int

    def __post_init__(self) -> None:
        if not self.label:
            raise ValueError("register label must be nonempty")
        if self.kind not in KINDS:
            raise ValueError(f"unknown register kind {self.kind!r}; expected one of {KINDS}")
        if self.dim < 1:
            raise ValueError(f"register {self.label!r} has dimension {self.dim}; need >= 1")

    def to_dict(self) -> dict:
        return {"label": self.label, "party": self.party, "kind": self.kind, "dim": self.dim}

    @classmethod
    def from_dict(cls, doc: dict) -> Subsystem:
        return cls(
            label=str(doc["label"]),
            party=str(doc["party"]),
            kind=str(doc["kind"]),
            dim=int(doc["dim"]),
        )


@dataclass(frozen=True)
class SystemLayout:
    """Ordered collection of registers; order equals tensor order."""

    subsystems: tuple[Subsystem, ...]

    def __post_init__(self) -> None:
        labels = [s.label for s in self.subsystems]
        if len(set(labels)) != len(labels):
            dupes = sorted({l for l in labels if labels.count(l) > 1})
            raise ValueError(f"duplicate register labels: {dupes}")

    @cached_property
    def _positions(self) -> dict[str, int]:
        return {s.label: i for i, s in enumerate(self.subsystems)}

    @cached_property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.subsystems)

    @cached_property
    def total_dim(self) -> int:
        out = 1
        for d in self.dims:
            out *= d
        return out

    @cached_property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.subsystems)

    def __len__(self) -> int:
        return len(self.subsystems)

    def position(self, label: str) -> int:
        try:
            return self._positions[label]
        except KeyError:
            raise KeyError(f"no register labeled {label!r}; have {list(self.labels)}") from None

    def subsystem(self, label: str) -> Subsystem:
        return self.subsystems[self.position(label)]

    def positions(self, labels: Iterable[str]) -> list[int]:
        out = [self.position(l) for l in labels]
        if len(set(out)) != len(out):
            raise ValueError("repeated register label in selection")
        return out

    @cached_property
    def parties(self) -> tuple[str, ...]:
        """Parties in order of first appearance, environments excluded."""
        seen: list[str] = []
        for s in self.subsystems:
            if s.kind != "env" and s.party not in seen:
                seen.append(s.party)
        return tuple(seen)

    @cached_property
    def players(self) -> tuple[str, ...]:
        return tuple(p for p in self.parties if p != DEALER)

    @property
    def n_players(self) -> int:
        return len(self.players)

    def party_labels(self, party: str) -> tuple[str, ...]:
        out = tuple(s.label for s in self.subsystems if s.party == party and s.kind != "env")
        if not out:
            raise KeyError(f"no registers owned by party {party!r}")
        return out

    def info_label(self, party: str) -> str:
        infos = [s.label for s in self.subsystems if s.party == party and s.kind == "info"]
        if len(infos) != 1:
            raise ValueError(f"party {party!r} has {len(infos)} info registers; need exactly 1")
        return infos[0]

    @cached_property
    def info_labels(self) -> tuple[str, ...]:
        """Dealer info first, then player info registers in player order."""
        return tuple(self.info_label(p) for p in (DEALER,) + self.players)

    @cached_property
    def shield_labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.subsystems if s.kind == "shield")

    @cached_property
    def env_labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.subsystems if s.kind == "env")

    @cached_property
    def qudit_dim(self) -> int:
        """Common info-register dimension d (requires crypto form)."""
        self.require_crypto_form()
        return self.subsystem(self.info_label(DEALER)).dim

    def require_crypto_form(self) -> None:
        """Raise unless this layout is dealer + players, one info register each."""
        if DEALER not in self.parties:
            raise ValueError("layout has no dealer party 'D'")
        if not self.players:
            raise ValueError("layout has no player parties")
        dims = set()
        for party in self.parties:
            dims.add(self.subsystem(self.info_label(party)).dim)
        if len(dims) != 1:
            raise ValueError(f"info registers disagree on qudit dimension: {sorted(dims)}")
        d = dims.pop()
        if d < 2:
            raise ValueError(f"qudit dimension must be >= 2, got {d}")

    def relabeled(self, mapping: dict[str, str]) -> SystemLayout:
        """New layout with labels renamed; labels absent from the map are kept."""
        subs = tuple(
            Subsystem(mapping.get(s.label, s.label), s.party, s.kind, s.dim)
            for s in self.subsystems
        )
        return SystemLayout(subs)

    def without(self, labels: Iterable[str]) -> SystemLayout:
        drop = set(labels)
        missing = drop - set(self.labels)
        if missing:
            raise KeyError(f"cannot drop unknown registers {sorted(missing)}")
        return SystemLayout(tuple(s for s in self.subsystems if s.label not in drop))

    def unique_label(self, base: str) -> str:
        if base not in self._positions:
            return base
        k = 2
        while f"{base}{k}" in self._positions:
            k += 1
        return f"{base}{k}"

    def to_dict(self) -> list[dict]:
        return [s.to_dict() for s in self.subsystems]

    @classmethod
    def from_dict(cls, doc: Sequence[dict]) -> SystemLayout:
        return cls(tuple(Subsystem.from_dict(entry) for entry in doc))


@dataclass(frozen=True)
class IndexSet:
    """All length-k digit strings over Z_d whose digit sum is t mod d."""

    digits: int
    modulus: int
    target: int
    members: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.digits < 1:
            raise ValueError("need at least one digit")
        if self.modulus < 2:
            raise ValueError("digit modulus must be >= 2")
        if not 0 <= self.target < self.modulus:
            raise ValueError(f"target {self.target} outside Z_{self.modulus}")
        for m in self.members:
            if len(m) != self.digits:
                raise ValueError(f"member {m} does not have {self.digits} digits")
            if any(not 0 <= x < self.modulus for x in m):
                raise ValueError(f"member {m} has digits outside Z_{self.modulus}")
            if sum(m) % self.modulus != self.target:
                raise ValueError(f"member {m} sums to {sum(m) % self.modulus}, not {self.target}")
        if list(self.members) != sorted(set(self.members)):
            raise ValueError("members must be sorted and unique")

    @property
    def size(self) -> int:
        return len(self.members)

    def __contains__(self, string: Sequence[int]) -> bool:
        return tuple(string) in set(self.members)


def digit_sum(digits: Sequence[int], modulus: int) -> int:
    """Sum of digits mod the qudit dimension."""
    if modulus < 2:
        raise ValueError("digit modulus must be >= 2")
    total = 0
    for x in digits:
        x = int(x)
        if not 0 <= x < modulus:
            raise ValueError(f"digit {x} outside Z_{modulus}")
        total += x
    return total % modulus


def index_set(digits: int, target: int, modulus: int) -> IndexSet:
    """Enumerate, in lexicographic order, strings in Z_d^k with digit sum t mod d."""
    if digits < 1:
        raise ValueError("need at least one digit")
    if modulus < 2:
        raise ValueError("digit modulus must be >= 2")
    if not 0 <= target < modulus:
        raise ValueError(f"target {target} outside Z_{modulus}")
    members = tuple(
        s
        for s in itertools.product(range(modulus), repeat=digits)
        if sum(s) % modulus == target
    )
    return IndexSet(digits=digits, modulus=modulus, target=target, members=members)


def standard_layout(
    d: int,
    n_players: int,
    shield_dims: Sequence[int] | None = None,
) -> SystemLayout:
    """Dealer-first layout: D.info, D.shield, A1.info, A1.shield, ...

    shield_dims gives the dealer's shield dimension first, then one per
    player; trivial shields are kept as dimension-1 registers so the layout
    shape never depends on whether a shield is in use.
    """
    if d < 2:
        raise ValueError("qudit dimension must be >= 2")
    if n_players < 1:
        raise ValueError("need at least one player")
    if shield_dims is None:
        shield_dims = (1,) * (n_players + 1)
    shield_dims = tuple(int(x) for x in shield_dims)
    if len(shield_dims) != n_players + 1:
        raise ValueError(
            f"expected {n_players + 1} shield dimensions (dealer first), got {len(shield_dims)}"
        )
    subs = [
        Subsystem("D.info", DEALER, "info", d),
        Subsystem("D.shield", DEALER, "shield", shield_dims[0]),
    ]
    for k in range(1, n_players + 1):
        subs.append(Subsystem(f"A{k}.info", f"A{k}", "info", d))
        subs.append(Subsystem(f"A{k}.shield", f"A{k}", "shield", shield_dims[k]))
    return SystemLayout(tuple(subs))
