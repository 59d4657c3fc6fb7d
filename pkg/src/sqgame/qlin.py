"""Dense complex linear algebra over small labelled tensor-product spaces.

Operators and kets carry a SubsystemShape naming their factors; the tensor
basis is row-major over the factors in declared order, and every contraction
(partial trace, partial transpose, Schmidt cut) is defined against that
ordering. Dimensions stay small (a few qubit/qudit factors), so everything
is dense complex128 and eigenproblems go straight to LAPACK.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from math import acos, pi
from typing import Iterable, Sequence

import numpy as np

from .policy import DEFAULT_POLICY, NumericPolicy


class LabelCollisionError(ValueError):
    """Two factors carry the same subsystem label."""


class UnknownLabelError(KeyError):
    """A named subsystem is not part of the shape."""


class PartitionError(ValueError):
    """A label set does not bipartition the shape."""


class ScalarTraceError(ValueError):
    """partial_trace asked to trace out every factor; use full_trace instead."""


class NotHermitianError(ValueError):
    """Operation requires the hermitian flag."""


@dataclass(frozen=True)
class SubsystemShape:
    dims: tuple[int, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.dims) != len(self.labels):
            raise ValueError("dims and labels must have equal length")
        if any(d < 1 for d in self.dims):
            raise ValueError(f"subsystem dimensions must be positive: {self.dims}")
        if len(set(self.labels)) != len(self.labels):
            raise LabelCollisionError(f"duplicate subsystem labels: {self.labels}")

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n_factors(self) -> int:
        return len(self.dims)

    def axis(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabelError(f"unknown subsystem label {label!r}; have {self.labels}")

    def restrict(self, labels: Iterable[str]) -> "SubsystemShape":
        """Sub-shape of the named factors, kept in declared order."""
        keep = set(labels)
        unknown = keep - set(self.labels)
        if unknown:
            raise UnknownLabelError(f"unknown labels {sorted(unknown)}; have {self.labels}")
        idx = [i for i, lab in enumerate(self.labels) if lab in keep]
        return SubsystemShape(tuple(self.dims[i] for i in idx), tuple(self.labels[i] for i in idx))


def qubits(labels: Sequence[str]) -> SubsystemShape:
    return SubsystemShape((2,) * len(labels), tuple(labels))


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=np.complex128)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Operator:
    """Complex square matrix on a labelled tensor-product space."""

    entries: np.ndarray
    shape: SubsystemShape
    hermitian: bool = False

    def __post_init__(self):
        object.__setattr__(self, "entries", _freeze(self.entries))
        n = self.shape.dim
        if self.entries.shape != (n, n):
            raise ValueError(f"entries shape {self.entries.shape} != ({n}, {n}) from {self.shape}")

    def validate(self, policy: NumericPolicy = DEFAULT_POLICY) -> "Operator":
        if self.hermitian:
            dev = float(np.abs(self.entries - self.entries.conj().T).max())
            if dev > policy.structural:
                raise NotHermitianError(f"hermitian flag set but max |E - E^dag| = {dev:.3e}")
        return self

    @property
    def dim(self) -> int:
        return self.shape.dim

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def relabel(self, labels: Sequence[str]) -> "Operator":
        return Operator(self.entries, SubsystemShape(self.shape.dims, tuple(labels)), self.hermitian)


@dataclass(frozen=True)
class KetVector:
    """Complex vector on a labelled tensor-product space."""

    amplitudes: np.ndarray
    shape: SubsystemShape
    norm_kind: str = "unit"

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        if self.norm_kind not in ("unit", "subnormalized"):
            raise ValueError(f"norm_kind must be 'unit' or 'subnormalized', got {self.norm_kind!r}")
        if amps.shape != (self.shape.dim,):
            raise ValueError(f"amplitude length {amps.shape} != {self.shape.dim} from {self.shape}")

    def validate(self, policy: NumericPolicy = DEFAULT_POLICY) -> "KetVector":
        n = self.norm()
        if self.norm_kind == "unit" and abs(n - 1.0) > policy.structural:
            raise ValueError(f"unit ket has norm {n!r}")
        if self.norm_kind == "subnormalized" and n > 1.0 + policy.structural:
            raise ValueError(f"subnormalized ket has norm {n!r} > 1")
        return self

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def projector(self) -> Operator:
        return Operator(np.outer(self.amplitudes, self.amplitudes.conj()), self.shape, hermitian=True)

    def relabel(self, labels: Sequence[str]) -> "KetVector":
        return KetVector(self.amplitudes, SubsystemShape(self.shape.dims, tuple(labels)), self.norm_kind)


@dataclass(frozen=True)
class SchmidtForm:
    """Schmidt data of a bipartite vector: descending coefficients and local bases."""

    coefficients: np.ndarray
    left_basis: tuple[KetVector, ...]
    right_basis: tuple[KetVector, ...]
    angle: float

    def __post_init__(self):
        c = np.ascontiguousarray(self.coefficients, dtype=np.float64)
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    def reconstruct(self) -> np.ndarray:
        """Flat amplitudes of sum_k c_k |l_k> (x) |r_k>."""
        return sum(
            c * np.kron(l.amplitudes, r.amplitudes)
            for c, l, r in zip(self.coefficients, self.left_basis, self.right_basis)
        )


@dataclass(frozen=True)
class Spectrum:
    """Descending eigenvalues with phase-fixed eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: tuple[KetVector, ...] = field(default_factory=tuple)

    def __post_init__(self):
        v = np.ascontiguousarray(self.eigenvalues, dtype=np.float64)
        v.setflags(write=False)
        object.__setattr__(self, "eigenvalues", v)

    def reconstruct(self) -> np.ndarray:
        n = self.eigenvectors[0].amplitudes.size
        out = np.zeros((n, n), dtype=np.complex128)
        for lam, vec in zip(self.eigenvalues, self.eigenvectors):
            out += lam * np.outer(vec.amplitudes, vec.amplitudes.conj())
        return out


# ---------------------------------------------------------------------------
# operations


def tensor(ops: Sequence[Operator]) -> Operator:
    """Kronecker product with concatenated labels; hermitian iff all factors are."""
    if not ops:
        raise ValueError("tensor of zero operators")
    labels: list[str] = []
    dims: list[int] = []
    for op in ops:
        labels.extend(op.shape.labels)
        dims.extend(op.shape.dims)
    if len(set(labels)) != len(labels):
        raise LabelCollisionError(f"duplicate subsystem labels in tensor product: {labels}")
    out = ops[0].entries
    for op in ops[1:]:
        out = np.kron(out, op.entries)
    return Operator(out, SubsystemShape(tuple(dims), tuple(labels)),
                    hermitian=all(op.hermitian for op in ops))


def tensor_kets(kets: Sequence[KetVector]) -> KetVector:
    labels: list[str] = []
    dims: list[int] = []
    for k in kets:
        labels.extend(k.shape.labels)
        dims.extend(k.shape.dims)
    if len(set(labels)) != len(labels):
        raise LabelCollisionError(f"duplicate subsystem labels in tensor product: {labels}")
    out = kets[0].amplitudes
    for k in kets[1:]:
        out = np.kron(out, k.amplitudes)
    kind = "unit" if all(k.norm_kind == "unit" for k in kets) else "subnormalized"
    return KetVector(out, SubsystemShape(tuple(dims), tuple(labels)), kind)


def partial_trace(op: Operator, keep: Iterable[str]) -> Operator:
    """Trace out every factor not named in keep; kept factors stay in declared order."""
    keep_set = set(keep)
    unknown = keep_set - set(op.shape.labels)
    if unknown:
        raise UnknownLabelError(f"unknown labels {sorted(unknown)}; have {op.shape.labels}")
    if not keep_set:
        raise ScalarTraceError("empty keep set; use full_trace for the scalar")
    n = op.shape.n_factors
    letters = string.ascii_lowercase
    if 2 * n > len(letters):
        raise ValueError("too many factors for partial_trace")
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    out_row, out_col = [], []
    for i, lab in enumerate(op.shape.labels):
        if lab in keep_set:
            out_row.append(row[i])
            out_col.append(col[i])
        else:
            col[i] = row[i]
    spec = "".join(row) + "".join(col) + "->" + "".join(out_row) + "".join(out_col)
    t = op.entries.reshape(op.shape.dims + op.shape.dims)
    sub = op.shape.restrict(keep_set)
    out = np.einsum(spec, t).reshape(sub.dim, sub.dim)
    return Operator(out, sub, hermitian=op.hermitian)


def full_trace(op: Operator) -> complex:
    return complex(np.trace(op.entries))


def partial_transpose(op: Operator, subsystem: str) -> Operator:
    """Transpose on the named factor only."""
    i = op.shape.axis(subsystem)
    n = op.shape.n_factors
    t = op.entries.reshape(op.shape.dims + op.shape.dims)
    perm = list(range(2 * n))
    perm[i], perm[n + i] = perm[n + i], perm[i]
    out = t.transpose(perm).reshape(op.dim, op.dim)
    return Operator(out, op.shape, hermitian=op.hermitian)


def _phase_fix_columns(v: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Rotate each column so its first component of modulus > tol is real positive."""
    out = v.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        idx = np.flatnonzero(np.abs(col) > tol)
        if idx.size:
            ph = col[idx[0]] / abs(col[idx[0]])
            out[:, k] = col / ph
    return out


def eig_hermitian(op: Operator, policy: NumericPolicy = DEFAULT_POLICY) -> Spectrum:
    """Descending eigendecomposition with deterministic eigenvector phases.

    Degenerate subspaces come back in whatever orthonormal basis LAPACK picks;
    downstream comparisons must use basis-independent quantities.
    """
    if not op.hermitian:
        raise NotHermitianError("eig_hermitian requires the hermitian flag")
    op.validate(policy)
    w, v = np.linalg.eigh(op.entries)
    w = w[::-1]
    v = _phase_fix_columns(v[:, ::-1])
    vecs = tuple(KetVector(v[:, k], op.shape, "unit") for k in range(v.shape[1]))
    return Spectrum(w, vecs)


def schmidt(v: KetVector, left: Iterable[str]) -> SchmidtForm:
    """Schmidt decomposition across the cut (left labels | remaining labels)."""
    left_labels = tuple(left)
    all_labels = v.shape.labels
    if not left_labels or set(left_labels) - set(all_labels):
        raise PartitionError(f"cut {left_labels} does not select factors of {all_labels}")
    right_labels = tuple(lab for lab in all_labels if lab not in set(left_labels))
    if not right_labels:
        raise PartitionError(f"cut {left_labels} leaves no right side in {all_labels}")
    lshape = v.shape.restrict(left_labels)
    rshape = v.shape.restrict(right_labels)
    axes = [v.shape.axis(lab) for lab in lshape.labels] + [v.shape.axis(lab) for lab in rshape.labels]
    amp = v.amplitudes.reshape(v.shape.dims).transpose(axes).reshape(lshape.dim, rshape.dim)
    u, s, vh = np.linalg.svd(amp)
    k = min(lshape.dim, rshape.dim)
    u, s, vh = u[:, :k], s[:k], vh[:k, :]
    for j in range(k):
        col = u[:, j]
        idx = np.flatnonzero(np.abs(col) > 1e-8)
        if idx.size:
            ph = col[idx[0]] / abs(col[idx[0]])
            u[:, j] = col / ph
            vh[j, :] = vh[j, :] * ph
    norm = float(np.linalg.norm(s))
    if norm == 0.0:
        raise ValueError("cannot Schmidt-decompose the zero vector")
    ang = acos(min(1.0, max(0.0, float(s[0]) / norm)))
    ang = min(ang, pi / 2 - ang) if ang > pi / 4 else ang
    left_basis = tuple(KetVector(u[:, j], lshape, "unit") for j in range(k))
    right_basis = tuple(KetVector(vh[j, :], rshape, "unit") for j in range(k))
    return SchmidtForm(s, left_basis, right_basis, ang)


def schmidt_coefficients(amplitudes: np.ndarray, dl: int = 2, dr: int = 2) -> np.ndarray:
    """Descending Schmidt coefficients of flat bipartite amplitudes (fast path)."""
    return np.linalg.svd(np.asarray(amplitudes).reshape(dl, dr), compute_uv=False)


def schmidt_angle(amplitudes: np.ndarray, dl: int = 2, dr: int = 2) -> float:
    s = schmidt_coefficients(amplitudes, dl, dr)
    n = float(np.linalg.norm(s))
    if n == 0.0:
        raise ValueError("zero vector has no Schmidt angle")
    ang = acos(min(1.0, max(0.0, float(s[0]) / n)))
    return min(ang, pi / 2 - ang) if ang > pi / 4 else ang


# ---------------------------------------------------------------------------
# seeded sampling (deterministic per seed; sample i of a batch uses seed + i)


def rng_for(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def haar_ket(dim: int, seed) -> np.ndarray:
    rng = rng_for(seed)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def haar_unitary(dim: int, seed) -> np.ndarray:
    """Haar unitary via QR of a complex Gaussian with R-diagonal phase correction."""
    rng = rng_for(seed)
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_density(dim: int, rank: int, seed) -> np.ndarray:
    """Random density matrix: Haar-rotated Dirichlet(1,..,1) spectrum of given rank."""
    if rank < 1:
        raise ValueError(f"rank must be >= 1, got {rank}")
    if rank > dim:
        raise ValueError(f"rank {rank} exceeds dimension {dim}")
    rng = rng_for(seed)
    w = rng.dirichlet(np.ones(rank))
    lam = np.zeros(dim)
    lam[:rank] = w
    u = haar_unitary(dim, rng)
    return (u * lam) @ u.conj().T


def random_ket(shape: SubsystemShape, seed) -> KetVector:
    return KetVector(haar_ket(shape.dim, seed), shape, "unit")


def random_density(shape: SubsystemShape, rank: int, seed) -> Operator:
    return Operator(haar_density(shape.dim, rank, seed), shape, hermitian=True)


def random_unitary(dim: int, seed, label: str = "U") -> Operator:
    return Operator(haar_unitary(dim, seed), SubsystemShape((dim,), (label,)), hermitian=False)
