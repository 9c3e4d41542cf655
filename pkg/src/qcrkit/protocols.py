"""Dealer-side protocol transformations between resource states.

reduce: a dishonest subset measures its info registers and announces the
digits; the dealer shifts its own register by the announced digit sum and
the remaining parties are left holding a smaller resource state.

compose: the dealer merges two resource states it shares with disjoint
player groups by adding one info register into the other (modular
controlled addition), after which the absorbed register joins the dealer's
shield.

expand_from_private: left fold of compose over a list of two-party states.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import defaults
from .registers import DEALER, ENV_PARTY, Subsystem, SystemLayout, digit_sum
from .states import (
    QuantumState,
    apply_unitary,
    measurement_distribution,
    partial_trace,
    project_registers,
    tensor_product,
)
from .verify import VerificationReport, is_qcr


class InputVerificationError(ValueError):
    """An input state failed certification; the report rides along."""

    def __init__(self, message: str, report: VerificationReport):
        super().__init__(message)
        self.report = report


def shift_matrix(d: int, beta: int) -> np.ndarray:
    """Modular shift sum_i |i+beta mod d><i|."""
    if d < 2:
        raise ValueError("qudit dimension must be >= 2")
    w = np.zeros((d, d), dtype=np.complex128)
    for i in range(d):
        w[(i + beta) % d, i] = 1.0
    return w


def cx_matrix(d: int) -> np.ndarray:
    """Modular controlled addition sum_{j,k} |j+k mod d, k><j, k|.

    First tensor slot is the target, second the control.
    """
    if d < 2:
        raise ValueError("qudit dimension must be >= 2")
    m = np.zeros((d * d, d * d), dtype=np.complex128)
    for j in range(d):
        for k in range(d):
            m[((j + k) % d) * d + k, j * d + k] = 1.0
    return m


@dataclass(frozen=True)
class ReductionOutcome:
    """One measurement branch of a reduction."""

    dishonest: tuple[str, ...]
    digits: tuple[int, ...]
    beta: int
    probability: float
    state: QuantumState
    correction_applied: bool

    def to_dict(self) -> dict:
        return {
            "dishonest": list(self.dishonest),
            "digits": list(self.digits),
            "beta": self.beta,
            "probability": self.probability,
            "correction_applied": self.correction_applied,
        }


@dataclass(frozen=True)
class CompositionRecord:
    """Provenance of a composition: layouts, relabeling, and the unitary used."""

    qudit_dim: int
    layout_a: SystemLayout
    layout_b: SystemLayout
    layout: SystemLayout
    cx_target: str
    cx_control: str
    relabel_a: dict = field(default_factory=dict)
    relabel_b: dict = field(default_factory=dict)

    @property
    def unitary_descriptor(self) -> str:
        return f"cX(d={self.qudit_dim}) target={self.cx_target} control={self.cx_control}"

    def to_dict(self) -> dict:
        return {
            "qudit_dim": self.qudit_dim,
            "unitary": self.unitary_descriptor,
            "cx_target": self.cx_target,
            "cx_control": self.cx_control,
            "layout_a": self.layout_a.to_dict(),
            "layout_b": self.layout_b.to_dict(),
            "layout": self.layout.to_dict(),
            "relabel_a": dict(self.relabel_a),
            "relabel_b": dict(self.relabel_b),
        }


def _require_certified(state: QuantumState, tol: float, role: str) -> None:
    report = is_qcr(state, tol=tol)
    if not report.verdict:
        raise InputVerificationError(
            f"{role} failed certification (failing: {', '.join(report.failing_conditions)})",
            report,
        )


def reduce(
    state: QuantumState,
    dishonest: Sequence[str] | str,
    outcome: Sequence[int] | None = None,
    *,
    rng: np.random.Generator | None = None,
    check: bool = True,
    tol: float = defaults.VERIFY_TOL,
) -> list[ReductionOutcome]:
    """Measure out a proper subset of players and correct the dealer register.

    Branches are enumerated exhaustively unless a specific outcome is named
    or an rng is supplied to sample a single branch. Each returned state
    lives on the layout with the measured players' registers removed.
    """
    layout = state.layout
    layout.require_crypto_form()
    d = layout.qudit_dim
    p2 = (dishonest,) if isinstance(dishonest, str) else tuple(dishonest)
    if not p2:
        raise ValueError("need at least one player to measure out")
    if len(set(p2)) != len(p2):
        raise ValueError("repeated player in subset")
    unknown = set(p2) - set(layout.players)
    if unknown:
        raise ValueError(f"unknown players: {sorted(unknown)}")
    if len(p2) >= layout.n_players:
        raise ValueError("cannot measure out every player; at least one must remain")
    if outcome is not None and rng is not None:
        raise ValueError("pass either a fixed outcome or an rng, not both")
    if check:
        _require_certified(state, tol, "reduction input")
    measured = [layout.info_label(p) for p in p2]
    meas_dims = [layout.subsystem(l).dim for l in measured]
    if outcome is not None:
        want = tuple(int(x) for x in outcome)
        if len(want) != len(measured):
            raise ValueError(f"outcome needs {len(measured)} digits, got {len(want)}")
        candidates = [want]
    elif rng is not None:
        probs = measurement_distribution(state, measured)
        flat = probs.reshape(-1)
        pick = int(rng.choice(flat.size, p=flat / flat.sum()))
        candidates = [tuple(int(x) for x in np.unravel_index(pick, probs.shape))]
    else:
        candidates = [digits for digits in _digit_strings(meas_dims)]
    # the measured info registers are removed by projection; the measured
    # players' shields still need tracing out
    shields = [
        l for p in p2 for l in layout.party_labels(p) if l not in set(measured)
    ]
    dealer_info = layout.info_label(DEALER)
    results = []
    for digits in candidates:
        prob, post = project_registers(state, measured, digits)
        if prob <= defaults.PROB_FLOOR or post is None:
            if outcome is not None:
                raise ValueError(f"outcome {digits} has zero probability")
            continue
        beta = digit_sum(digits, d)
        post = partial_trace(post, shields)
        corrected = beta != 0
        if corrected:
            post = apply_unitary(post, shift_matrix(d, beta), [dealer_info])
        results.append(
            ReductionOutcome(
                dishonest=p2,
                digits=digits,
                beta=beta,
                probability=prob,
                state=post,
                correction_applied=corrected,
            )
        )
    return results


def _digit_strings(dims: Sequence[int]):
    return itertools.product(*[range(n) for n in dims])


def _numbered(base: str, k: int) -> str:
    return base if k == 1 else f"{base}{k}"


def compose(
    a: QuantumState,
    b: QuantumState,
    *,
    check: bool = True,
    tol: float = defaults.VERIFY_TOL,
    cap: int | None = None,
) -> tuple[QuantumState, CompositionRecord]:
    """Merge two resource states held by one dealer with disjoint player groups.

    The joint state gets b's dealer info register added into a's (modular
    controlled addition, target on a's side); b's dealer info register is
    then reclassified as a dealer shield, players are renumbered A1..A_{N+M}
    (a's first), and the relabeling is recorded.
    """
    a.layout.require_crypto_form()
    b.layout.require_crypto_form()
    d = a.layout.qudit_dim
    if b.layout.qudit_dim != d:
        raise ValueError(
            f"qudit dimensions differ: {d} vs {b.layout.qudit_dim}"
        )
    if check:
        _require_certified(a, tol, "first composition input")
        _require_certified(b, tol, "second composition input")
    a1 = a.relabeled({l: f"a:{l}" for l in a.layout.labels})
    b1 = b.relabeled({l: f"b:{l}" for l in b.layout.labels})
    joint = tensor_product(a1, b1, cap=cap)
    a_dbar = f"a:{a.layout.info_label(DEALER)}"
    b_dbar = f"b:{b.layout.info_label(DEALER)}"
    joint = apply_unitary(joint, cx_matrix(d), [a_dbar, b_dbar])

    # target order and names for the merged layout
    entries: list[tuple[str, Subsystem]] = []
    entries.append((a_dbar, Subsystem("D.info", DEALER, "info", d)))
    shields = 0
    for side, src in (("a", a.layout), ("b", b.layout)):
        if side == "b":
            shields += 1
            entries.append(
                (b_dbar, Subsystem(_numbered("D.shield", shields), DEALER, "shield", d))
            )
        info = src.info_label(DEALER)
        for l in src.party_labels(DEALER):
            if l == info:
                continue
            shields += 1
            entries.append(
                (
                    f"{side}:{l}",
                    Subsystem(
                        _numbered("D.shield", shields), DEALER, "shield", src.subsystem(l).dim
                    ),
                )
            )
    k = 0
    for side, src in (("a", a.layout), ("b", b.layout)):
        for p in src.players:
            k += 1
            sc = 0
            for l in src.party_labels(p):
                sub = src.subsystem(l)
                if sub.kind == "info":
                    entries.append(
                        (f"{side}:{l}", Subsystem(f"A{k}.info", f"A{k}", "info", sub.dim))
                    )
                else:
                    sc += 1
                    entries.append(
                        (
                            f"{side}:{l}",
                            Subsystem(_numbered(f"A{k}.shield", sc), f"A{k}", "shield", sub.dim),
                        )
                    )
    ec = 0
    for side, src in (("a", a.layout), ("b", b.layout)):
        for l in src.env_labels:
            ec += 1
            entries.append(
                (
                    f"{side}:{l}",
                    Subsystem(_numbered("E", ec), ENV_PARTY, "env", src.subsystem(l).dim),
                )
            )

    order = [temp for temp, _ in entries]
    merged_layout = SystemLayout(tuple(sub for _, sub in entries))
    merged = joint.permuted(order).with_layout(merged_layout)

    final_of = {temp: sub.label for temp, sub in entries}
    record = CompositionRecord(
        qudit_dim=d,
        layout_a=a.layout,
        layout_b=b.layout,
        layout=merged_layout,
        cx_target="D.info",
        cx_control=final_of[b_dbar],
        relabel_a={l: final_of[f"a:{l}"] for l in a.layout.labels},
        relabel_b={l: final_of[f"b:{l}"] for l in b.layout.labels},
    )
    return merged, record


def expand_from_private(
    privates: Sequence[QuantumState],
    *,
    check: bool = True,
    tol: float = defaults.VERIFY_TOL,
    cap: int | None = None,
) -> QuantumState:
    """Fold a list of dealer-player pair states into one many-player state."""
    states = list(privates)
    if not states:
        raise ValueError("need at least one input state")
    for s in states:
        s.layout.require_crypto_form()
        if s.layout.n_players != 1:
            raise ValueError(
                f"inputs must have exactly one player, got {s.layout.n_players}"
            )
    acc = states[0]
    if len(states) == 1:
        if check:
            _require_certified(acc, tol, "expansion input")
        return acc
    for s in states[1:]:
        acc, _ = compose(acc, s, check=check, tol=tol, cap=cap)
    return acc
