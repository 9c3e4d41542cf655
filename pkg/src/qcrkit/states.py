"""Dense state algebra over register layouts.

States are numpy complex128 arrays bound to a SystemLayout: either a pure
vector or a density matrix, chosen per state. Pure states stay vectors
through every operation that allows it (tensor products, unitaries,
measurement, reduced densities via M @ M^dag), which is what keeps the
largest composed fixtures fast; nothing here ever eigendecomposes a matrix
bigger than the caller's own density representation.

Axis convention: reshaping a vector to ``layout.dims`` gives one axis per
register in layout order; density matrices reshape to ``dims + dims`` with
row axes first.
"""
from __future__ import annotations

import itertools
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from . import defaults
from .registers import ENV_PARTY, Subsystem, SystemLayout


class QuantumState:
    """A pure vector or a density matrix on a register layout."""

    def __init__(
        self,
        layout: SystemLayout,
        *,
        vector: np.ndarray | None = None,
        matrix: np.ndarray | None = None,
        validate: bool = True,
        copy: bool = True,
    ) -> None:
        if (vector is None) == (matrix is None):
            raise ValueError("provide exactly one of vector= or matrix=")
        self.layout = layout
        dim = layout.total_dim
        if vector is not None:
            arr = np.array(vector, dtype=np.complex128, copy=copy)
            if arr.shape != (dim,):
                raise ValueError(f"vector shape {arr.shape} does not match layout dim {dim}")
            if validate:
                norm2 = float(np.real(np.vdot(arr, arr)))
                if abs(norm2 - 1.0) > defaults.STATE_TOL:
                    raise ValueError(f"vector norm^2 = {norm2!r}, expected 1 within tolerance")
            self._vector: np.ndarray | None = arr
            self._matrix: np.ndarray | None = None
        else:
            arr = np.array(matrix, dtype=np.complex128, copy=copy)
            if arr.shape != (dim, dim):
                raise ValueError(f"matrix shape {arr.shape} does not match layout dim {dim}")
            if validate:
                herm = float(np.max(np.abs(arr - arr.conj().T))) if dim else 0.0
                if herm > defaults.STATE_TOL:
                    raise ValueError(f"matrix is not Hermitian (max asymmetry {herm!r})")
                tr = float(np.real(np.trace(arr)))
                if abs(tr - 1.0) > defaults.STATE_TOL:
                    raise ValueError(f"matrix trace = {tr!r}, expected 1 within tolerance")
            self._vector = None
            self._matrix = arr
        arr.setflags(write=False)

    # -- representation ------------------------------------------------

    @property
    def is_pure(self) -> bool:
        """True when held as a vector (a density matrix may still be rank 1)."""
        return self._vector is not None

    @property
    def vector(self) -> np.ndarray:
        if self._vector is None:
            raise ValueError("state is held as a density matrix; no vector available")
        return self._vector

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            raise ValueError("state is held as a pure vector; use density_matrix() or to_density()")
        return self._matrix

    @property
    def dim(self) -> int:
        return self.layout.total_dim

    @property
    def dims(self) -> tuple[int, ...]:
        return self.layout.dims

    def density_matrix(self) -> np.ndarray:
        """The density matrix, projecting a pure vector if needed."""
        if self._matrix is not None:
            return self._matrix
        v = self._vector
        return np.outer(v, v.conj())

    def to_density(self) -> QuantumState:
        if self._matrix is not None:
            return self
        return QuantumState(self.layout, matrix=self.density_matrix(), validate=False, copy=False)

    def purity(self) -> float:
        if self._vector is not None:
            return 1.0
        m = self._matrix
        return float(np.real(np.einsum("ij,ji->", m, m)))

    def trace(self) -> float:
        if self._vector is not None:
            return float(np.real(np.vdot(self._vector, self._vector)))
        return float(np.real(np.trace(self._matrix)))

    # -- layout manipulation -------------------------------------------

    def permuted(self, label_order: Sequence[str]) -> QuantumState:
        """Reorder registers; label_order must be a permutation of the layout."""
        if sorted(label_order) != sorted(self.layout.labels):
            raise ValueError("label_order must be a permutation of the layout labels")
        perm = [self.layout.position(l) for l in label_order]
        new_layout = SystemLayout(tuple(self.layout.subsystems[p] for p in perm))
        n = len(perm)
        if self._vector is not None:
            v = self._vector.reshape(self.dims).transpose(perm).reshape(-1)
            return QuantumState(new_layout, vector=v, validate=False, copy=False)
        axes = perm + [p + n for p in perm]
        m = (
            self._matrix.reshape(self.dims + self.dims)
            .transpose(axes)
            .reshape(self.dim, self.dim)
        )
        return QuantumState(new_layout, matrix=m, validate=False, copy=False)

    def relabeled(self, mapping: dict[str, str]) -> QuantumState:
        """Rename registers without touching the data."""
        return self.with_layout(self.layout.relabeled(mapping))

    def with_layout(self, new_layout: SystemLayout) -> QuantumState:
        """Swap layout metadata; register count and dimensions must match."""
        if new_layout.dims != self.layout.dims:
            raise ValueError(
                f"layout dims {new_layout.dims} incompatible with state dims {self.layout.dims}"
            )
        if self._vector is not None:
            return QuantumState(new_layout, vector=self._vector, validate=False, copy=False)
        return QuantumState(new_layout, matrix=self._matrix, validate=False, copy=False)

    @classmethod
    def basis_state(cls, layout: SystemLayout, digits: Sequence[int]) -> QuantumState:
        """Computational basis ket |digits> in layout order."""
        digits = tuple(int(x) for x in digits)
        if len(digits) != len(layout):
            raise ValueError(f"need {len(layout)} digits, got {len(digits)}")
        for x, sub in zip(digits, layout.subsystems):
            if not 0 <= x < sub.dim:
                raise ValueError(f"digit {x} out of range for register {sub.label!r} (dim {sub.dim})")
        v = np.zeros(layout.total_dim, dtype=np.complex128)
        v[int(np.ravel_multi_index(digits, layout.dims))] = 1.0
        return cls(layout, vector=v, validate=False, copy=False)

    def __repr__(self) -> str:
        rep = "pure" if self.is_pure else "density"
        return f"QuantumState({rep}, dim={self.dim}, registers={list(self.layout.labels)})"


class MeasurementOutcome(NamedTuple):
    digits: tuple[int, ...]
    probability: float
    state: QuantumState


def tensor_product(a: QuantumState, b: QuantumState, cap: int | None = None) -> QuantumState:
    """Join two states on disjoint register sets; pure inputs give a pure output."""
    overlap = set(a.layout.labels) & set(b.layout.labels)
    if overlap:
        raise ValueError(f"register labels collide: {sorted(overlap)}")
    limit = defaults.DIM_CAP if cap is None else cap
    joint_dim = a.dim * b.dim
    if joint_dim > limit:
        raise ValueError(f"joint dimension {joint_dim} exceeds cap {limit}")
    layout = SystemLayout(a.layout.subsystems + b.layout.subsystems)
    if a.is_pure and b.is_pure:
        return QuantumState(layout, vector=np.kron(a.vector, b.vector), validate=False, copy=False)
    m = np.kron(a.density_matrix(), b.density_matrix())
    return QuantumState(layout, matrix=m, validate=False, copy=False)


def _split_axes(layout: SystemLayout, labels: Sequence[str]) -> tuple[list[int], list[int]]:
    chosen = layout.positions(labels)
    rest = [i for i in range(len(layout)) if i not in set(chosen)]
    return chosen, rest


def partial_trace(state: QuantumState, over: Sequence[str]) -> QuantumState:
    """Trace out the named registers; result is a density state on the rest.

    Fast path: tracing only dimension-1 registers preserves a pure vector.
    """
    over = list(over)
    if not over:
        return state
    pos, rest = _split_axes(state.layout, over)
    new_layout = state.layout.without(over)
    dims = state.dims
    if state.is_pure and all(dims[p] == 1 for p in pos):
        # dropping dimension-1 axes leaves the flat vector unchanged
        return QuantumState(new_layout, vector=state.vector, validate=False, copy=False)
    keep_dim = new_layout.total_dim
    if state.is_pure:
        over_dim = state.dim // keep_dim
        m = state.vector.reshape(dims).transpose(rest + pos).reshape(keep_dim, over_dim)
        rho = m @ m.conj().T
        return QuantumState(new_layout, matrix=rho, validate=False, copy=False)
    n = len(dims)
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if 2 * n > len(letters):
        raise ValueError(f"too many registers ({n}) for the einsum contraction")
    row = list(letters[:n])
    col = list(row)
    next_free = n
    for i in rest:
        col[i] = letters[next_free]
        next_free += 1
    out = "".join(row[i] for i in rest) + "".join(col[i] for i in rest)
    spec = "".join(row) + "".join(col) + "->" + out
    rho = np.einsum(spec, state.matrix.reshape(dims + dims)).reshape(keep_dim, keep_dim)
    return QuantumState(new_layout, matrix=rho, validate=False, copy=False)


def partial_transpose(state: QuantumState, over: Sequence[str]) -> np.ndarray:
    """Transpose the named registers inside the density matrix.

    Refuses a pure-vector state: project with to_density() first, since the
    result of a partial transpose is not a state and cannot stay a vector.
    """
    if state.is_pure:
        raise ValueError("partial_transpose needs a density matrix; call to_density() first")
    over = list(over)
    pos = state.layout.positions(over)
    n = len(state.dims)
    axes = list(range(2 * n))
    for p in pos:
        axes[p], axes[n + p] = axes[n + p], axes[p]
    return (
        state.matrix.reshape(state.dims + state.dims)
        .transpose(axes)
        .reshape(state.dim, state.dim)
    )


def trace_norm(a: np.ndarray) -> float:
    """Sum of singular values. For a difference of states the range is [0, 2]."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"trace_norm expects a matrix, got shape {a.shape}")
    return float(np.linalg.svd(a, compute_uv=False).sum())


def measurement_distribution(state: QuantumState, on: Sequence[str]) -> np.ndarray:
    """Computational-basis outcome probabilities on the named registers.

    Returns an array indexed by one axis per requested register, in the
    requested order. No post-measurement states are formed, so this is cheap
    even on the largest states.
    """
    on = list(on)
    if not on:
        raise ValueError("need at least one register to measure")
    pos, rest = _split_axes(state.layout, on)
    dims = state.dims
    if state.is_pure:
        weights = np.abs(state.vector.reshape(dims)) ** 2
    else:
        weights = np.real(np.diagonal(state.matrix)).reshape(dims)
    if rest:
        weights = weights.sum(axis=tuple(rest))
    # axes now follow layout order restricted to `pos`; reorder to caller order
    order = np.argsort(np.argsort(pos))
    return weights.transpose(order)


def measure_computational(
    state: QuantumState,
    on: Sequence[str],
    prob_floor: float = defaults.PROB_FLOOR,
) -> list[MeasurementOutcome]:
    """Measure the named registers, returning every branch above prob_floor.

    Post-measurement states keep the full layout, with measured registers
    collapsed onto the observed basis state. Probabilities sum to 1 up to the
    discarded floor mass.
    """
    on = list(on)
    if not on:
        raise ValueError("need at least one register to measure")
    pos, rest = _split_axes(state.layout, on)
    dims = state.dims
    n = len(dims)
    on_dims = tuple(dims[p] for p in pos)
    on_dim = int(np.prod(on_dims)) if on_dims else 1
    rest_dim = state.dim // on_dim
    outcomes: list[MeasurementOutcome] = []
    if state.is_pure:
        perm = pos + rest
        w = state.vector.reshape(dims).transpose(perm).reshape(on_dim, rest_dim)
        inv = list(np.argsort(perm))
        perm_dims = tuple(dims[a] for a in perm)
        for k, digits in enumerate(itertools.product(*[range(d) for d in on_dims])):
            amp = w[k]
            p = float(np.real(np.vdot(amp, amp)))
            if p <= prob_floor:
                continue
            full = np.zeros_like(w)
            full[k] = amp / np.sqrt(p)
            post = full.reshape(perm_dims).transpose(inv).reshape(-1)
            outcomes.append(
                MeasurementOutcome(
                    digits, p, QuantumState(state.layout, vector=post, validate=False, copy=False)
                )
            )
        return outcomes
    perm = pos + rest
    axes = perm + [n + a for a in perm]
    perm_dims = tuple(dims[a] for a in perm)
    r = (
        state.matrix.reshape(dims + dims)
        .transpose(axes)
        .reshape(on_dim, rest_dim, on_dim, rest_dim)
    )
    inv = list(np.argsort(axes))
    for k, digits in enumerate(itertools.product(*[range(d) for d in on_dims])):
        block = r[k, :, k, :]
        p = float(np.real(np.trace(block)))
        if p <= prob_floor:
            continue
        full = np.zeros_like(r)
        full[k, :, k, :] = block / p
        post = full.reshape(perm_dims + perm_dims).transpose(inv).reshape(state.dim, state.dim)
        outcomes.append(
            MeasurementOutcome(
                digits, p, QuantumState(state.layout, matrix=post, validate=False, copy=False)
            )
        )
    return outcomes


def project_registers(
    state: QuantumState, on: Sequence[str], digits: Sequence[int]
) -> tuple[float, QuantumState | None]:
    """Project the named registers onto given digits and drop them.

    Returns (probability, conditional state on the remaining layout); the
    state is None when the probability is exactly zero. Unlike
    measure_computational this removes the measured registers, and a pure
    input stays pure.
    """
    on = list(on)
    if not on:
        raise ValueError("need at least one register to project")
    digits = tuple(int(x) for x in digits)
    if len(digits) != len(on):
        raise ValueError(f"need {len(on)} digits, got {len(digits)}")
    pos, _ = _split_axes(state.layout, on)
    dims = state.dims
    n = len(dims)
    for x, p in zip(digits, pos):
        if not 0 <= x < dims[p]:
            raise ValueError(f"digit {x} out of range for register at position {p} (dim {dims[p]})")
    new_layout = state.layout.without(on)
    keep_dim = new_layout.total_dim
    idx: list = [slice(None)] * n
    for x, p in zip(digits, pos):
        idx[p] = x
    if state.is_pure:
        sub = state.vector.reshape(dims)[tuple(idx)].reshape(-1)
        prob = float(np.real(np.vdot(sub, sub)))
        if prob <= 0.0:
            return 0.0, None
        return prob, QuantumState(
            new_layout, vector=sub / np.sqrt(prob), validate=False, copy=False
        )
    block = state.matrix.reshape(dims + dims)[tuple(idx + idx)].reshape(keep_dim, keep_dim)
    prob = float(np.real(np.trace(block)))
    if prob <= 0.0:
        return max(prob, 0.0), None
    return prob, QuantumState(new_layout, matrix=block / prob, validate=False, copy=False)


def purify(
    state: QuantumState,
    env_label: str | None = None,
    rank_eps: float = defaults.RANK_EPS,
) -> QuantumState:
    """Append an environment register and return a pure state reducing to the input.

    The environment dimension equals the numerical rank of the density matrix
    (eigenvalues above rank_eps); a state already held as a vector gets a
    dimension-1 environment and is otherwise unchanged.
    """
    label = env_label or state.layout.unique_label("E")
    if state.is_pure:
        env = Subsystem(label, ENV_PARTY, "env", 1)
        layout = SystemLayout(state.layout.subsystems + (env,))
        return QuantumState(layout, vector=state.vector, validate=False, copy=False)
    rho = state.matrix
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > defaults.STATE_TOL:
        raise ValueError(f"cannot purify: matrix is not Hermitian (max asymmetry {herm!r})")
    vals, vecs = np.linalg.eigh(rho)
    if float(vals.min()) < -defaults.STATE_TOL:
        raise ValueError(f"cannot purify: eigenvalue {float(vals.min())!r} below -{defaults.STATE_TOL}")
    keep = vals > rank_eps
    rank = int(np.count_nonzero(keep))
    if rank == 0:
        raise ValueError("cannot purify: matrix is numerically zero")
    amps = vecs[:, keep] * np.sqrt(vals[keep])
    env = Subsystem(label, ENV_PARTY, "env", rank)
    layout = SystemLayout(state.layout.subsystems + (env,))
    return QuantumState(layout, vector=amps.reshape(-1), validate=False, copy=False)


def _check_unitary(u: np.ndarray, dim: int, tol: float) -> np.ndarray:
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (dim, dim):
        raise ValueError(f"unitary shape {u.shape} does not match target dimension {dim}")
    dev = float(np.max(np.abs(u.conj().T @ u - np.eye(dim))))
    if dev > tol:
        raise ValueError(f"matrix is not unitary within {tol} (max deviation {dev!r})")
    return u


def apply_unitary(
    state: QuantumState,
    u: np.ndarray,
    on: Sequence[str],
    unitary_tol: float = defaults.UNITARY_TOL,
) -> QuantumState:
    """Apply a unitary to the named registers (in the given order)."""
    on = list(on)
    pos, rest = _split_axes(state.layout, on)
    dims = state.dims
    n = len(dims)
    t_dim = 1
    for p in pos:
        t_dim *= dims[p]
    u = _check_unitary(u, t_dim, unitary_tol)
    rest_dim = state.dim // t_dim
    perm = pos + rest
    perm_dims = tuple(dims[a] for a in perm)
    if state.is_pure:
        w = state.vector.reshape(dims).transpose(perm).reshape(t_dim, rest_dim)
        out = (u @ w).reshape(perm_dims).transpose(list(np.argsort(perm))).reshape(-1)
        return QuantumState(state.layout, vector=out, validate=False, copy=False)
    axes = perm + [n + a for a in perm]
    r = (
        state.matrix.reshape(dims + dims)
        .transpose(axes)
        .reshape(t_dim, rest_dim, t_dim, rest_dim)
    )
    out = np.einsum("ab,bxcy,dc->axdy", u, r, u.conj())
    out = out.reshape(perm_dims + perm_dims).transpose(list(np.argsort(axes)))
    return QuantumState(
        state.layout, matrix=out.reshape(state.dim, state.dim), validate=False, copy=False
    )


def apply_controlled(
    state: QuantumState,
    control: Sequence[str],
    target: Sequence[str],
    blocks: Mapping[tuple[int, ...], np.ndarray],
    unitary_tol: float = defaults.UNITARY_TOL,
) -> QuantumState:
    """Apply sum_k |k><k| (x) B_k with k running over control-register digits.

    blocks maps control digit tuples to unitaries on the target registers;
    missing keys act as the identity. Control and target register sets must
    be disjoint.
    """
    control = list(control)
    target = list(target)
    if set(control) & set(target):
        raise ValueError("control and target registers must be disjoint")
    if not control or not target:
        raise ValueError("need at least one control and one target register")
    c_pos = state.layout.positions(control)
    t_pos = state.layout.positions(target)
    dims = state.dims
    n = len(dims)
    c_dims = tuple(dims[p] for p in c_pos)
    c_dim = int(np.prod(c_dims))
    t_dim = 1
    for p in t_pos:
        t_dim *= dims[p]
    checked: dict[tuple[int, ...], np.ndarray] = {}
    for key, b in blocks.items():
        key = tuple(int(x) for x in key)
        if len(key) != len(control) or any(
            not 0 <= x < d for x, d in zip(key, c_dims)
        ):
            raise ValueError(f"control key {key} out of range for dims {c_dims}")
        checked[key] = _check_unitary(b, t_dim, unitary_tol)
    taken = set(c_pos) | set(t_pos)
    rest = [i for i in range(n) if i not in taken]
    rest_dim = state.dim // (c_dim * t_dim)
    perm = c_pos + t_pos + rest
    perm_dims = tuple(dims[a] for a in perm)
    keys = list(itertools.product(*[range(d) for d in c_dims]))
    if state.is_pure:
        w = state.vector.reshape(dims).transpose(perm).reshape(c_dim, t_dim, rest_dim).copy()
        for k, key in enumerate(keys):
            b = checked.get(key)
            if b is not None:
                w[k] = b @ w[k]
        out = w.reshape(perm_dims).transpose(list(np.argsort(perm))).reshape(-1)
        return QuantumState(state.layout, vector=out, validate=False, copy=False)
    axes = perm + [n + a for a in perm]
    r = (
        state.matrix.reshape(dims + dims)
        .transpose(axes)
        .reshape(c_dim, t_dim, rest_dim, c_dim, t_dim, rest_dim)
        .copy()
    )
    eye = np.eye(t_dim, dtype=np.complex128)
    for k, key_k in enumerate(keys):
        bk = checked.get(key_k)
        for l, key_l in enumerate(keys):
            bl = checked.get(key_l)
            if bk is None and bl is None:
                continue
            blk = r[k, :, :, l, :, :]
            r[k, :, :, l, :, :] = np.einsum(
                "ab,bxdy,cd->axcy", bk if bk is not None else eye, blk,
                (bl if bl is not None else eye).conj(),
            )
    out = r.reshape(perm_dims + perm_dims).transpose(list(np.argsort(axes)))
    return QuantumState(
        state.layout, matrix=out.reshape(state.dim, state.dim), validate=False, copy=False
    )
