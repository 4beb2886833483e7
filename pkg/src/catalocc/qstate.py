"""Dense finite-dimensional states, operators and channels over labelled layouts.

Every array is indexed row-major against its :class:`SystemLayout`: the first
subsystem in the layout is the most significant Kronecker factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

import numpy as np
import scipy.stats

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-8
TP_TOL = 1e-8
EIG_CLAMP = 1e-10


class Party(str, Enum):
    ALICE = "Alice"
    BOB = "Bob"
    REFEREE = "Referee"
    CHARLIE = "Charlie"
    CATALYST = "Catalyst"
    REGISTER = "Register"


class LayoutError(ValueError):
    """Raised for label collisions, unknown labels and dimension mismatches."""


@dataclass(frozen=True)
class Subsystem:
    label: str
    dim: int
    party: Party

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise LayoutError(f"subsystem {self.label!r}: dimension must be a positive integer, got {self.dim}")
        object.__setattr__(self, "party", Party(self.party))


@dataclass(frozen=True)
class SystemLayout:
    subsystems: tuple[Subsystem, ...]

    def __post_init__(self):
        subs = tuple(self.subsystems)
        object.__setattr__(self, "subsystems", subs)
        labels = [s.label for s in subs]
        if len(set(labels)) != len(labels):
            dupes = sorted({l for l in labels if labels.count(l) > 1})
            raise LayoutError(f"duplicate subsystem labels: {dupes}")

    @classmethod
    def of(cls, *specs: tuple[str, int, Union[Party, str]]) -> "SystemLayout":
        """Build a layout from ``(label, dim, party)`` triples."""
        return cls(tuple(Subsystem(label, int(dim), Party(party)) for label, dim, party in specs))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.subsystems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.subsystems)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64)) if self.subsystems else 1

    def __len__(self):
        return len(self.subsystems)

    def __iter__(self):
        return iter(self.subsystems)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LayoutError(f"unknown subsystem label {label!r}; layout has {list(self.labels)}") from None

    def indices(self, labels: Iterable[str]) -> list[int]:
        return [self.index(l) for l in labels]

    def dim_of(self, labels: Iterable[str]) -> int:
        return int(np.prod([self.subsystems[i].dim for i in self.indices(labels)], dtype=np.int64))

    def select(self, labels: Iterable[str]) -> "SystemLayout":
        """Sub-layout with the given labels, in the order given."""
        return SystemLayout(tuple(self.subsystems[i] for i in self.indices(labels)))

    def labels_of(self, *parties: Union[Party, str]) -> tuple[str, ...]:
        wanted = {Party(p) for p in parties}
        return tuple(s.label for s in self.subsystems if s.party in wanted)

    def concat(self, other: "SystemLayout") -> "SystemLayout":
        clash = set(self.labels) & set(other.labels)
        if clash:
            raise LayoutError(f"label collision in tensor product: {sorted(clash)}")
        return SystemLayout(self.subsystems + other.subsystems)

    def to_list(self) -> list[dict]:
        return [{"label": s.label, "dim": s.dim, "party": s.party.value} for s in self.subsystems]


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def clamped_eigh(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of the hermitized matrix, spectrum clamped at zero."""
    w, v = np.linalg.eigh(_hermitize(m))
    w = np.where((w < 0) & (w >= -EIG_CLAMP), 0.0, w)
    return w, v


@dataclass(frozen=True, eq=False)
class PureState:
    layout: SystemLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.layout.total_dim:
            raise LayoutError(f"amplitude vector has length {amps.size}, layout needs {self.layout.total_dim}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |norm - 1| = {abs(norm - 1.0):.3e}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, layout: SystemLayout, amplitudes) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(layout, amps / np.linalg.norm(amps))

    def density(self) -> "DensityOperator":
        return DensityOperator(self.layout, np.outer(self.amplitudes, self.amplitudes.conj()))

    def purity(self) -> float:
        return 1.0


@dataclass(frozen=True, eq=False)
class DensityOperator:
    layout: SystemLayout
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d = self.layout.total_dim
        if m.shape != (d, d):
            raise LayoutError(f"matrix has shape {m.shape}, layout needs {(d, d)}")
        herm_dev = np.max(np.abs(m - m.conj().T)) if d else 0.0
        if herm_dev > HERMITIAN_TOL:
            raise ValueError(f"matrix not Hermitian: max deviation {herm_dev:.3e}")
        m = _hermitize(m)
        tr = np.trace(m).real
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"trace not 1: |tr - 1| = {abs(tr - 1.0):.3e}")
        # shifted Cholesky is a cheap PSD test; eigvalsh only for the diagnostic
        try:
            np.linalg.cholesky(m + 2 * EIG_CLAMP * np.eye(d))
        except np.linalg.LinAlgError:
            lam_min = np.linalg.eigvalsh(m).min()
            if lam_min < -EIG_CLAMP:
                raise ValueError(f"matrix not positive semidefinite: min eigenvalue {lam_min:.3e}") from None
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def density(self) -> "DensityOperator":
        return self

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def eigenvalues(self) -> np.ndarray:
        return clamped_eigh(self.matrix)[0]


State = Union[PureState, DensityOperator]


def maximally_mixed(layout: SystemLayout) -> DensityOperator:
    d = layout.total_dim
    return DensityOperator(layout, np.eye(d) / d)


def basis_state(layout: SystemLayout, index: Union[int, Sequence[int]]) -> PureState:
    """Computational basis ket; ``index`` is flat or one digit per subsystem."""
    if not isinstance(index, (int, np.integer)):
        index = int(np.ravel_multi_index(tuple(index), layout.dims))
    amps = np.zeros(layout.total_dim, dtype=complex)
    amps[index] = 1.0
    return PureState(layout, amps)


def relabel(state: State, layout: SystemLayout) -> State:
    """Reinterpret a state's array on another layout with identical dimensions."""
    if layout.dims != state.layout.dims:
        raise LayoutError(f"cannot relabel dims {state.layout.dims} as {layout.dims}")
    if isinstance(state, PureState):
        return PureState(layout, state.amplitudes)
    return DensityOperator(layout, state.matrix)


def tensor(a: State, b: State) -> State:
    layout = a.layout.concat(b.layout)
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(layout, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, PureState) or isinstance(b, PureState):
        raise TypeError("tensor expects two pure states or two density operators")
    return DensityOperator(layout, np.kron(a.matrix, b.matrix))


def tensor_all(states: Iterable[State]) -> State:
    states = list(states)
    if not states:
        raise ValueError("tensor_all needs at least one state")
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s)
    return out


def _transpose_density(matrix: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    n = len(dims)
    d = int(np.prod(dims, dtype=np.int64))
    t = matrix.reshape(tuple(dims) * 2)
    t = t.transpose(list(order) + [n + i for i in order])
    return t.reshape(d, d)


def reorder(state: State, labels: Sequence[str]) -> State:
    """Reorder the layout itself (labels travel with their data)."""
    labels = list(labels)
    if sorted(labels) != sorted(state.layout.labels):
        raise LayoutError(f"reorder needs a permutation of {list(state.layout.labels)}, got {labels}")
    order = state.layout.indices(labels)
    layout = state.layout.select(labels)
    dims = state.layout.dims
    if isinstance(state, PureState):
        amps = state.amplitudes.reshape(dims).transpose(order).reshape(-1)
        return PureState(layout, amps)
    return DensityOperator(layout, _transpose_density(state.matrix, dims, order))


def permute_subsystems(state: State, mapping: Mapping[str, str]) -> State:
    """Move the content of subsystem ``src`` into slot ``mapping[src]``.

    The layout is unchanged; labels not mentioned stay put. The mapping must be
    a bijection on its keys and each move must preserve the local dimension.
    """
    layout = state.layout
    if sorted(mapping.keys()) != sorted(mapping.values()):
        raise LayoutError("subsystem permutation must map a label set onto itself")
    axes = list(range(len(layout)))
    for src, dst in mapping.items():
        i, j = layout.index(src), layout.index(dst)
        if layout.subsystems[i].dim != layout.subsystems[j].dim:
            raise LayoutError(
                f"permutation moves {src!r} (dim {layout.subsystems[i].dim}) into {dst!r} "
                f"(dim {layout.subsystems[j].dim})"
            )
        axes[j] = i
    dims = layout.dims
    if isinstance(state, PureState):
        return PureState(layout, state.amplitudes.reshape(dims).transpose(axes).reshape(-1))
    return DensityOperator(layout, _transpose_density(state.matrix, dims, axes))


def partial_trace(rho: State, discard: Iterable[str]) -> DensityOperator:
    """Trace out the subsystems in ``discard``; kept labels retain their order."""
    rho = rho.density()
    layout = rho.layout
    discard = set(discard)
    idx = set(layout.indices(discard))
    if len(idx) == len(layout) and len(layout) > 0:
        raise LayoutError("partial trace would discard every subsystem")
    keep = [i for i in range(len(layout)) if i not in idx]
    n = len(layout)
    if not idx:
        return rho
    letters = [chr(ord("a") + i) for i in range(n)]
    upper = [chr(ord("A") + i) if i not in idx else letters[i] for i in range(n)]
    out = "".join(letters[i] for i in keep) + "".join(upper[i] for i in keep)
    t = rho.matrix.reshape(layout.dims * 2)
    reduced = np.einsum("".join(letters) + "".join(upper) + "->" + out, t)
    kept_layout = SystemLayout(tuple(layout.subsystems[i] for i in keep))
    d = kept_layout.total_dim
    return DensityOperator(kept_layout, _hermitize(reduced.reshape(d, d)))


def reduced(rho: State, keep: Iterable[str]) -> DensityOperator:
    """Marginal on ``keep`` (in layout order)."""
    keep = set(keep)
    rho_layout = rho.layout
    rho_layout.indices(keep)
    return partial_trace(rho, [l for l in rho_layout.labels if l not in keep])


def _conjugate_on(matrix: np.ndarray, dims: Sequence[int], target_idx: Sequence[int], ops: Sequence[np.ndarray]) -> np.ndarray:
    """Return sum_j (K_j ⊗ I) M (K_j ⊗ I)^† with K_j acting on ``target_idx``."""
    n = len(dims)
    rest = [i for i in range(n) if i not in target_idx]
    order = list(target_idx) + rest
    d_t = int(np.prod([dims[i] for i in target_idx], dtype=np.int64))
    d_r = int(np.prod([dims[i] for i in rest], dtype=np.int64))
    t = _transpose_density(matrix, dims, order).reshape(d_t, d_r, d_t, d_r)
    x = t.reshape(d_t, d_r * d_t * d_r)
    acc = np.zeros((d_t, d_r, d_t, d_r), dtype=complex)
    ops = np.asarray(ops, dtype=complex)
    # keep the batched intermediate around 32 MB
    chunk = max(1, int(2e6 // max(1, x.size)))
    for start in range(0, len(ops), chunk):
        ks = ops[start:start + chunk]
        y = np.matmul(ks, x).reshape(len(ks), d_t, d_r, d_t, d_r)
        acc += np.einsum("jaxcy,jdc->axdy", y, ks.conj(), optimize=True)
    out = acc.reshape(d_t * d_r, d_t * d_r)
    new_dims = [dims[i] for i in order]
    inverse = list(np.argsort(order))
    return _transpose_density(out, new_dims, inverse)


class QuantumChannel:
    """CPTP map in operator-sum form acting on a fixed set of subsystems."""

    def __init__(self, kraus_ops: Sequence[np.ndarray], input_labels: Sequence[str] = (), output_labels: Sequence[str] = ()):
        ops = tuple(np.asarray(k, dtype=complex) for k in kraus_ops)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        d = ops[0].shape[-1]
        for k in ops:
            if k.ndim != 2 or k.shape != (d, d):
                raise ValueError(f"Kraus operators must all be {d}x{d}, got {k.shape}")
        completeness = sum(k.conj().T @ k for k in ops)
        dev = np.max(np.abs(completeness - np.eye(d)))
        if dev > TP_TOL:
            raise ValueError(f"Kraus operators not trace preserving: max deviation {dev:.3e}")
        self._kraus = ops
        self._dim = d
        self._set_labels(input_labels, output_labels)

    def _set_labels(self, input_labels, output_labels):
        self.input_labels = tuple(input_labels)
        self.output_labels = tuple(output_labels) or self.input_labels
        if len(self.output_labels) != len(self.input_labels):
            raise ValueError("output_labels must match input_labels in length")

    @property
    def kraus_ops(self) -> tuple[np.ndarray, ...]:
        return self._kraus

    @property
    def dim(self) -> int:
        return self._dim

    def act(self, matrix: np.ndarray, dims: Sequence[int], target_idx: Sequence[int]) -> np.ndarray:
        """Apply the map to the ``target_idx`` factors of a joint matrix."""
        return _conjugate_on(matrix, dims, target_idx, self.kraus_ops)


class ReplacementChannel(QuantumChannel):
    """x -> Tr[x] * state.

    The Kraus form sqrt(g_j)|g_j><i| has rank(state) * d operators, so the action
    is evaluated in closed form and the operators are only built on request.
    """

    def __init__(self, state: State, labels: Sequence[str] = ()):
        self.state = state.density()
        self._dim = self.state.layout.total_dim
        self._set_labels(labels, ())

    @property
    def kraus_ops(self) -> tuple[np.ndarray, ...]:
        w, v = clamped_eigh(self.state.matrix)
        d = self._dim
        ops = []
        for g, vec in zip(w, v.T):
            if g <= 0:
                continue
            for i in range(d):
                k = np.zeros((d, d), dtype=complex)
                k[:, i] = np.sqrt(g) * vec
                ops.append(k)
        return tuple(ops)

    def act(self, matrix, dims, target_idx):
        n = len(dims)
        rest = [i for i in range(n) if i not in target_idx]
        order = list(target_idx) + rest
        d_t = self._dim
        d_r = int(np.prod([dims[i] for i in rest], dtype=np.int64))
        t = _transpose_density(matrix, dims, order).reshape(d_t, d_r, d_t, d_r)
        out = np.kron(self.state.matrix, np.einsum("axay->xy", t))
        new_dims = [dims[i] for i in order]
        return _transpose_density(out, new_dims, list(np.argsort(order)))


def apply_channel(rho: State, channel: QuantumChannel, targets: Sequence[str] | None = None) -> DensityOperator:
    """Apply ``channel`` on ``targets`` (defaults to its input labels), identity elsewhere."""
    rho = rho.density()
    targets = list(targets if targets is not None else channel.input_labels)
    idx = rho.layout.indices(targets)
    d_t = rho.layout.dim_of(targets)
    if d_t != channel.dim:
        raise LayoutError(f"channel acts on dimension {channel.dim}, targets {targets} have dimension {d_t}")
    out = channel.act(rho.matrix, rho.layout.dims, idx)
    return DensityOperator(rho.layout, _hermitize(out))


def apply_local_unitary(state: State, unitary, targets: Sequence[str]) -> State:
    u = np.asarray(unitary, dtype=complex)
    d = u.shape[0]
    if u.shape != (d, d) or np.max(np.abs(u.conj().T @ u - np.eye(d))) > UNITARY_TOL:
        raise ValueError("operator is not unitary")
    targets = list(targets)
    layout = state.layout
    idx = layout.indices(targets)
    if layout.dim_of(targets) != d:
        raise LayoutError(f"unitary has dimension {d}, targets {targets} have dimension {layout.dim_of(targets)}")
    if isinstance(state, PureState):
        dims = layout.dims
        rest = [i for i in range(len(dims)) if i not in idx]
        order = idx + rest
        t = state.amplitudes.reshape(dims).transpose(order).reshape(d, -1)
        t = (u @ t).reshape([dims[i] for i in order]).transpose(list(np.argsort(order)))
        return PureState(layout, t.reshape(-1))
    return DensityOperator(layout, _hermitize(_conjugate_on(state.matrix, layout.dims, idx, [u])))


class Outcome(NamedTuple):
    index: int
    probability: float
    state: DensityOperator | None


def projective_measure(rho: State, basis, target: str, zero_tol: float = 1e-14) -> list[Outcome]:
    """Rank-one projective measurement of ``target`` in an orthonormal ``basis``.

    ``basis`` is a sequence of vectors (rows). Outcomes whose probability does
    not exceed ``zero_tol`` carry ``state=None``.
    """
    rho = rho.density()
    b = np.atleast_2d(np.asarray(basis, dtype=complex))
    d = rho.layout.dim_of([target])
    if b.shape != (d, d):
        raise ValueError(f"basis must contain {d} vectors of length {d}, got shape {b.shape}")
    if np.max(np.abs(b.conj() @ b.T - np.eye(d))) > UNITARY_TOL:
        raise ValueError("measurement basis is not orthonormal")
    idx = rho.layout.indices([target])
    outcomes = []
    for k in range(d):
        proj = np.outer(b[k], b[k].conj())
        m = _hermitize(_conjugate_on(rho.matrix, rho.layout.dims, idx, [proj]))
        p = float(np.trace(m).real)
        if p <= zero_tol:
            outcomes.append(Outcome(k, max(p, 0.0), None))
        else:
            outcomes.append(Outcome(k, p, DensityOperator(rho.layout, m / p)))
    return outcomes


def mix(weighted: Iterable[tuple[float, State]]) -> DensityOperator:
    """Convex combination of states on a common layout."""
    weighted = list(weighted)
    layout = weighted[0][1].layout
    total = np.zeros((layout.total_dim,) * 2, dtype=complex)
    for w, s in weighted:
        if s.layout != layout:
            raise LayoutError("mixture components live on different layouts")
        total += w * s.density().matrix
    return DensityOperator(layout, _hermitize(total))


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    coefficients: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray
    left_layout: SystemLayout
    right_layout: SystemLayout

    def reconstruct(self) -> np.ndarray:
        """Amplitudes of sum_i c_i |l_i>|r_i> on left_layout + right_layout."""
        return np.einsum("i,ia,ib->ab", self.coefficients, self.left_basis, self.right_basis).reshape(-1)

    @property
    def spectrum(self) -> np.ndarray:
        return self.coefficients ** 2


def _first_nonzero_key(v: np.ndarray) -> tuple[float, float]:
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    if nz.size == 0:
        return (0.0, 0.0)
    c = v[nz[0]]
    return (float(c.real), float(c.imag))


def split_cut(layout: SystemLayout, cut) -> tuple[list[str], list[str]]:
    """Normalize ``cut`` (left labels, or a ``(left, right)`` pair) into two label lists."""
    if isinstance(cut, str):
        cut = [cut]
    cut = list(cut)
    if len(cut) == 2 and not isinstance(cut[0], str):
        left, right = list(cut[0]), list(cut[1])
    else:
        left = cut
        right = [l for l in layout.labels if l not in set(left)]
    layout.indices(left + right)
    if not left or not right:
        raise LayoutError("cut must split the layout into two nonempty parts")
    if set(left) & set(right) or sorted(left + right) != sorted(layout.labels):
        raise LayoutError(f"cut {left} | {right} is not a bipartition of {list(layout.labels)}")
    return left, right


def schmidt(psi: PureState, cut) -> SchmidtDecomposition:
    left, right = split_cut(psi.layout, cut)
    ordered = reorder(psi, left + right)
    d_l = psi.layout.dim_of(left)
    d_r = psi.layout.dim_of(right)
    u, s, vh = np.linalg.svd(ordered.amplitudes.reshape(d_l, d_r), full_matrices=False)
    lb, rb = u.T, vh
    # deterministic order inside degenerate groups
    order = sorted(range(len(s)), key=lambda i: (-round(s[i], 12), _first_nonzero_key(lb[i])))
    return SchmidtDecomposition(
        coefficients=s[order],
        left_basis=lb[order],
        right_basis=rb[order],
        left_layout=psi.layout.select(left),
        right_layout=psi.layout.select(right),
    )


def _fresh_label(layout: SystemLayout, base: str) -> str:
    label = base
    while label in layout.labels:
        label += "'"
    return label


def purify(rho: State, reference_label: str = "T", party: Party = Party.REFEREE) -> PureState:
    """Canonical purification sum_i sqrt(p_i) |e_i> ⊗ |i>_T with p_i descending."""
    rho = rho.density()
    w, v = clamped_eigh(rho.matrix)
    order = np.argsort(-w, kind="stable")
    w, v = np.clip(w[order], 0.0, None), v[:, order]
    # fix each eigenvector's phase: largest-magnitude component real positive
    pivots = np.argmax(np.abs(v), axis=0)
    phases = v[pivots, np.arange(v.shape[1])]
    v = v * (np.abs(phases) / phases)
    d = rho.layout.total_dim
    ref = Subsystem(_fresh_label(rho.layout, reference_label), d, party)
    layout = SystemLayout(rho.layout.subsystems + (ref,))
    amps = (v * np.sqrt(w)).reshape(-1)
    return PureState.normalized(layout, amps)


def cyclic_shift(n: int) -> np.ndarray:
    """Permutation matrix |i> -> |i+1>, |n> -> |1> on an n-level register."""
    return np.roll(np.eye(n), 1, axis=0)


def swap_unitary(d: int) -> np.ndarray:
    s = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return s


# --- channel constructors -------------------------------------------------

def identity_channel(dim: int, labels: Sequence[str] = ()) -> QuantumChannel:
    return QuantumChannel((np.eye(dim),), tuple(labels))


def unitary_channel(u, labels: Sequence[str] = ()) -> QuantumChannel:
    return QuantumChannel((np.asarray(u, dtype=complex),), tuple(labels))


def depolarizing_channel(dim: int, p: float = 1.0, labels: Sequence[str] = ()) -> QuantumChannel:
    """x -> (1-p) x + p Tr[x] I/d."""
    ops = [np.sqrt(1 - p) * np.eye(dim)] if p < 1 else []
    for i in range(dim):
        for j in range(dim):
            k = np.zeros((dim, dim))
            k[i, j] = np.sqrt(p / dim)
            ops.append(k)
    return QuantumChannel(tuple(ops), tuple(labels))


def replacement_channel(state: State, labels: Sequence[str] = ()) -> ReplacementChannel:
    return ReplacementChannel(state, labels)


# --- random generators ----------------------------------------------------

def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    if dim == 1:
        return np.exp(2j * np.pi * rng.random()) * np.eye(1)
    return scipy.stats.unitary_group.rvs(dim, random_state=rng)


def random_pure_state(layout: SystemLayout, rng: np.random.Generator) -> PureState:
    d = layout.total_dim
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState.normalized(layout, z)


def random_density(layout: SystemLayout, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    d = layout.total_dim
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    return DensityOperator(layout, m / np.trace(m).real)


def random_channel(dim: int, n_kraus: int, rng: np.random.Generator, labels: Sequence[str] = ()) -> QuantumChannel:
    """Random CPTP map from a Haar isometry (Stinespring dilation)."""
    u = random_unitary(dim * n_kraus, rng)
    iso = u[:, :dim]
    ops = tuple(iso[k * dim:(k + 1) * dim, :] for k in range(n_kraus))
    return QuantumChannel(ops, tuple(labels))
