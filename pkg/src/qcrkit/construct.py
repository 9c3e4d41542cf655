"""Builders for the supported state families.

Families: private states (dealer + one player, digit-keyed shield twist),
the 6-qubit worked example, GHZ-type correlated states with an arbitrary
shield seed, and info-controlled twists of the latter. Builders construct
candidates; certification is the verifier's job, and build_twisted_qcr
returns the verification report alongside the state rather than asserting
structural correctness.

Private and GHZ density outputs are written with exact 1/d entries, so for
power-of-two d the downstream measurement statistics are exact dyadics.
"""
from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from . import defaults
from .registers import DEALER, SystemLayout, index_set, standard_layout
from .states import QuantumState, _check_unitary, apply_controlled


class ShieldSeed:
    """Initial joint state of the shield registers, dealer's shield first."""

    def __init__(
        self,
        dims: Sequence[int],
        *,
        vector: np.ndarray | None = None,
        matrix: np.ndarray | None = None,
    ) -> None:
        self.dims = tuple(int(x) for x in dims)
        if not self.dims or any(d < 1 for d in self.dims):
            raise ValueError(f"shield dims must be positive, got {self.dims}")
        total = self.total_dim
        if (vector is None) == (matrix is None):
            raise ValueError("provide exactly one of vector= or matrix=")
        if vector is not None:
            arr = np.array(vector, dtype=np.complex128)
            if arr.shape != (total,):
                raise ValueError(f"seed vector shape {arr.shape}, expected ({total},)")
            norm2 = float(np.real(np.vdot(arr, arr)))
            if abs(norm2 - 1.0) > defaults.STATE_TOL:
                raise ValueError(f"seed vector norm^2 = {norm2!r}, expected 1")
            self.vector: np.ndarray | None = arr
            self.matrix: np.ndarray | None = None
        else:
            arr = np.array(matrix, dtype=np.complex128)
            if arr.shape != (total, total):
                raise ValueError(f"seed matrix shape {arr.shape}, expected ({total}, {total})")
            if float(np.max(np.abs(arr - arr.conj().T))) > defaults.STATE_TOL:
                raise ValueError("seed matrix is not Hermitian")
            if abs(float(np.real(np.trace(arr))) - 1.0) > defaults.STATE_TOL:
                raise ValueError("seed matrix trace is not 1")
            self.vector = None
            self.matrix = arr
        arr.setflags(write=False)

    @property
    def total_dim(self) -> int:
        out = 1
        for d in self.dims:
            out *= d
        return out

    @property
    def is_pure(self) -> bool:
        return self.vector is not None

    def density(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        return np.outer(self.vector, self.vector.conj())

    @classmethod
    def trivial(cls, n_parties: int) -> ShieldSeed:
        """Dimension-1 shield on every party: no shield at all."""
        return cls((1,) * n_parties, vector=np.ones(1))

    @classmethod
    def basis_zero(cls, dims: Sequence[int]) -> ShieldSeed:
        v = np.zeros(int(np.prod([int(x) for x in dims])), dtype=np.complex128)
        v[0] = 1.0
        return cls(dims, vector=v)

    @classmethod
    def random(
        cls, dims: Sequence[int], rng: np.random.Generator, pure: bool = False
    ) -> ShieldSeed:
        total = int(np.prod([int(x) for x in dims]))
        if pure:
            return cls(dims, vector=random_pure(total, rng))
        return cls(dims, matrix=random_density(total, rng))


class TwistingFamily:
    """Digit-keyed unitaries applied to shield registers.

    Keys are digit tuples (a bare int is accepted for single-digit keys):
    the dealer digit for private states, the full info string for
    controlled twists. targets names the shield registers the unitaries act
    on; None means every shield register of the state being built.
    """

    def __init__(
        self,
        unitaries: Mapping[tuple[int, ...] | int, np.ndarray],
        targets: Sequence[str] | None = None,
    ) -> None:
        table: dict[tuple[int, ...], np.ndarray] = {}
        for key, u in unitaries.items():
            if isinstance(key, int):
                key = (key,)
            key = tuple(int(x) for x in key)
            if any(x < 0 for x in key):
                raise ValueError(f"twist key {key} has negative digits")
            arr = np.array(u, dtype=np.complex128)
            arr.setflags(write=False)
            table[key] = arr
        self.unitaries = table
        self.targets = tuple(targets) if targets is not None else None

    def keys(self) -> set[tuple[int, ...]]:
        return set(self.unitaries)


def build_private_state(
    d: int,
    sigma: ShieldSeed | None = None,
    twist: TwistingFamily | None = None,
    cap: int | None = None,
) -> QuantumState:
    """Dealer-player pair (1/d) sum_{i,j} |i,-i><j,-j| (x) U_i sigma U_j^dag.

    With trivial sigma and no twist this is the maximally entangled state in
    the |i, -i> basis. The result is always in density representation; the
    diagonal weights are written as exact 1/d.
    """
    if d < 2:
        raise ValueError("qudit dimension must be >= 2")
    if sigma is None:
        sigma = ShieldSeed.trivial(2)
    if len(sigma.dims) != 2:
        raise ValueError(
            f"private-state seed needs 2 shield dims (dealer, player), got {len(sigma.dims)}"
        )
    layout = standard_layout(d, 1, sigma.dims)
    limit = defaults.DIM_CAP if cap is None else cap
    if layout.total_dim > limit:
        raise ValueError(f"state dimension {layout.total_dim} exceeds cap {limit}")
    s_dim = sigma.total_dim
    if twist is None:
        blocks = {i: np.eye(s_dim, dtype=np.complex128) for i in range(d)}
    else:
        wanted = {(i,) for i in range(d)}
        if twist.keys() != wanted:
            raise ValueError(
                f"private-state twist needs exactly the keys {{(0,)..({d - 1},)}}, got {sorted(twist.keys())}"
            )
        blocks = {
            key[0]: _check_unitary(u, s_dim, defaults.UNITARY_TOL)
            for key, u in twist.unitaries.items()
        }
    sig = sigma.density()
    sd, sa = sigma.dims
    shaped = (d, sd, d, sa)
    rho = np.zeros((layout.total_dim, layout.total_dim), dtype=np.complex128)
    view = rho.reshape(shaped + shaped)
    w = 1.0 / d
    for i in range(d):
        for j in range(d):
            block = w * (blocks[i] @ sig @ blocks[j].conj().T)
            view[i, :, (d - i) % d, :, j, :, (d - j) % d, :] = block.reshape(sd, sa, sd, sa)
    return QuantumState(layout, matrix=rho, validate=False, copy=False)


def maximally_entangled(d: int) -> QuantumState:
    """The simplest private state: trivial shields, identity twist."""
    return build_private_state(d)


def build_example_state() -> QuantumState:
    """The 6-qubit worked example: 1/2 (|000>|000> + |011>|100> + |101>|100> + |110>|000>).

    Kets are written info-then-shield (dealer, player 1, player 2); the
    returned layout interleaves each party's info and shield registers.
    """
    layout = standard_layout(2, 2, (2, 2, 2))
    terms = [
        ((0, 0, 0), (0, 0, 0)),
        ((0, 1, 1), (1, 0, 0)),
        ((1, 0, 1), (1, 0, 0)),
        ((1, 1, 0), (0, 0, 0)),
    ]
    v = np.zeros(layout.total_dim, dtype=np.complex128).reshape(layout.dims)
    for info, shield in terms:
        v[info[0], shield[0], info[1], shield[1], info[2], shield[2]] = 0.5
    return QuantumState(layout, vector=v.reshape(-1), validate=False, copy=False)


def build_ghz_qcr(
    d: int,
    n_players: int,
    sigma: ShieldSeed | None = None,
    cap: int | None = None,
) -> QuantumState:
    """Untwisted correlated state: (1/d^N) sum_{iI, jJ in S0} |iI><jJ| (x) sigma.

    A pure sigma gives a pure output vector; a mixed sigma gives the density
    form with exact 1/d^N block weights.
    """
    if d < 2:
        raise ValueError("qudit dimension must be >= 2")
    if n_players < 1:
        raise ValueError("need at least one player")
    if sigma is None:
        sigma = ShieldSeed.trivial(n_players + 1)
    if len(sigma.dims) != n_players + 1:
        raise ValueError(
            f"need {n_players + 1} shield dims (dealer first), got {len(sigma.dims)}"
        )
    layout = standard_layout(d, n_players, sigma.dims)
    limit = defaults.DIM_CAP if cap is None else cap
    if layout.total_dim > limit:
        raise ValueError(f"state dimension {layout.total_dim} exceeds cap {limit}")
    members = index_set(n_players + 1, 0, d).members
    info_pos = [layout.position(l) for l in layout.info_labels]
    n_regs = len(layout)
    if sigma.is_pure:
        amp = 1.0 / np.sqrt(len(members))
        s = sigma.vector.reshape(sigma.dims)
        v = np.zeros(layout.total_dim, dtype=np.complex128).reshape(layout.dims)
        for m in members:
            idx: list = [slice(None)] * n_regs
            for pos, digit in zip(info_pos, m):
                idx[pos] = digit
            v[tuple(idx)] = amp * s
        return QuantumState(layout, vector=v.reshape(-1), validate=False, copy=False)
    weight = 1.0 / len(members)
    smat = sigma.density().reshape(sigma.dims + sigma.dims)
    rho = np.zeros((layout.total_dim, layout.total_dim), dtype=np.complex128)
    view = rho.reshape(layout.dims + layout.dims)
    for m in members:
        for mp in members:
            idx = [slice(None)] * (2 * n_regs)
            for pos, digit in zip(info_pos, m):
                idx[pos] = digit
            for pos, digit in zip(info_pos, mp):
                idx[n_regs + pos] = digit
            view[tuple(idx)] = weight * smat
    return QuantumState(layout, matrix=rho, validate=False, copy=False)


def build_twisted_qcr(
    base: QuantumState,
    twist: TwistingFamily,
    tol: float = defaults.VERIFY_TOL,
    exhaustive: bool = False,
):
    """Apply an info-controlled shield twist to a GHZ-type base and certify it.

    Twist keys are full info strings (dealer digit first). Keys must lie on
    the digit-sum-0 support; missing support strings act as the identity.
    Returns (state, report) where report is the verifier's full output --
    the twisted state is a candidate, and callers should trust the verdict,
    not the construction.
    """
    from .verify import is_qcr

    layout = base.layout
    layout.require_crypto_form()
    d = layout.qudit_dim
    n_info = len(layout.info_labels)
    support = set(index_set(n_info, 0, d).members)
    for key in twist.keys():
        if len(key) != n_info or any(x >= d for x in key):
            raise ValueError(f"twist key {key} is not a length-{n_info} string over Z_{d}")
        if key not in support:
            raise ValueError(f"twist key {key} lies outside the digit-sum-0 support")
    targets = twist.targets if twist.targets is not None else layout.shield_labels
    if not targets:
        raise ValueError("layout has no shield registers to twist")
    state = apply_controlled(base, control=layout.info_labels, target=targets, blocks=twist.unitaries)
    report = is_qcr(state, tol=tol, exhaustive=exhaustive)
    return state, report


def per_party_twist(
    layout: SystemLayout,
    per_party: Mapping[str, Mapping[int, np.ndarray]],
) -> TwistingFamily:
    """Full-string twist from per-party digit-keyed shield unitaries.

    Party p's unitary is selected by p's own info digit, so the combined
    W^{iI} = U_D^i (x) V_1^{i_1} (x) ... factors across the shields. This is
    the family whose outputs are QCR by construction (each party's shield is
    only ever correlated with that party's own digit).
    """
    layout.require_crypto_form()
    d = layout.qudit_dim
    parties = (DEALER,) + layout.players
    shield_owner = {l: layout.subsystem(l).party for l in layout.shield_labels}
    for party in per_party:
        owned = [l for l, p in shield_owner.items() if p == party]
        if len(owned) != 1:
            raise ValueError(
                f"per-party twist needs exactly one shield register for {party!r}, found {len(owned)}"
            )
    unitaries: dict[tuple[int, ...], np.ndarray] = {}
    for key in index_set(len(parties), 0, d).members:
        digit_of = dict(zip(parties, key))
        factors = []
        for label in layout.shield_labels:
            dim = layout.subsystem(label).dim
            party = shield_owner[label]
            table = per_party.get(party)
            u = table.get(digit_of[party]) if table else None
            factors.append(np.eye(dim, dtype=np.complex128) if u is None else np.asarray(u))
        block = factors[0]
        for f in factors[1:]:
            block = np.kron(block, f)
        unitaries[key] = block
    return TwistingFamily(unitaries, targets=layout.shield_labels)


def relabel_negated_player(state: QuantumState, player: str) -> QuantumState:
    """Basis relabel |i> -> |-i mod d> on one player's info register.

    Converts between the |i, -i> correlation convention and |i, i>.
    """
    layout = state.layout
    layout.require_crypto_form()
    label = layout.info_label(player)
    d = layout.subsystem(label).dim
    neg = np.zeros((d, d), dtype=np.complex128)
    for i in range(d):
        neg[(d - i) % d, i] = 1.0
    from .states import apply_unitary

    return apply_unitary(state, neg, [label])


# -- seeded random instances ------------------------------------------


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r).copy()
    phases /= np.abs(phases)
    return q * phases


def random_pure(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random full(ish)-rank density matrix from a Wishart draw."""
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.real(np.trace(rho))


def random_separable_density(
    dim_a: int, dim_b: int, rng: np.random.Generator, terms: int = 4
) -> np.ndarray:
    """Convex mixture of product densities: separable, hence PPT."""
    weights = rng.dirichlet(np.ones(terms))
    rho = np.zeros((dim_a * dim_b, dim_a * dim_b), dtype=np.complex128)
    for w in weights:
        rho += w * np.kron(random_density(dim_a, rng), random_density(dim_b, rng))
    return rho


def random_private_state(
    d: int,
    shield_dims: Sequence[int],
    rng: np.random.Generator,
    pure_seed: bool = False,
) -> QuantumState:
    """Seeded random (sigma, twist) instance of the private-state family."""
    sigma = ShieldSeed.random(shield_dims, rng, pure=pure_seed)
    total = sigma.total_dim
    twist = TwistingFamily({(i,): haar_unitary(total, rng) for i in range(d)})
    return build_private_state(d, sigma, twist)


def random_party_twist(layout: SystemLayout, rng: np.random.Generator) -> TwistingFamily:
    """Haar per-party twist on every nontrivial shield register."""
    layout.require_crypto_form()
    d = layout.qudit_dim
    per_party: dict[str, dict[int, np.ndarray]] = {}
    for label in layout.shield_labels:
        sub = layout.subsystem(label)
        if sub.dim == 1:
            continue
        per_party[sub.party] = {i: haar_unitary(sub.dim, rng) for i in range(d)}
    return per_party_twist(layout, per_party)
