"""Dense complex linear algebra used by every machine in the package.

Vectors are 1-d ``complex128`` arrays and are treated as *row* vectors:
a state ``v`` evolves as ``v @ U``. Matrices are 2-d ``complex128`` arrays.
"""

from __future__ import annotations

import numpy as np

from .errors import InvariantError, ShapeError

DEFAULT_TOL = 1e-9


def as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=complex)
    if arr.ndim != 1 or arr.size == 0:
        raise ShapeError(f"expected a non-empty 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvariantError("vector has non-finite entries")
    return arr


def as_matrix(m) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.size == 0:
        raise ShapeError(f"expected a non-empty 2-d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvariantError("matrix has non-finite entries")
    return arr


def frozen(arr: np.ndarray) -> np.ndarray:
    """Return a read-only copy of ``arr``."""
    out = np.array(arr, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


def conjugate_transpose(m) -> np.ndarray:
    return as_matrix(m).conj().T.copy()


def is_unitary(m, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``m @ m^dagger`` is within ``tol`` (max entry) of the identity."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"unitarity needs a square matrix, got {m.shape}")
    dev = m @ m.conj().T - np.eye(m.shape[0])
    return bool(np.max(np.abs(dev)) < tol)


def direct_sum(m, n) -> np.ndarray:
    """Block-diagonal matrix ``[[m, 0], [0, n]]``."""
    m, n = as_matrix(m), as_matrix(n)
    out = np.zeros((m.shape[0] + n.shape[0], m.shape[1] + n.shape[1]), dtype=complex)
    out[: m.shape[0], : m.shape[1]] = m
    out[m.shape[0]:, m.shape[1]:] = n
    return out


def tensor_product(m, n) -> np.ndarray:
    """Kronecker product with pairing ``<i,k> = n_rows(N) * i + k`` (0-based).

    Works for vectors as well as matrices.
    """
    return np.kron(np.asarray(m, dtype=complex), np.asarray(n, dtype=complex))


class OrthonormalBasis:
    """An orthonormal family of vectors spanning a subspace of C^d.

    The projector onto the subspace is never materialized; use
    :meth:`coefficients` to get the amplitudes ``<h_i|v>``.
    """

    __slots__ = ("vectors", "ambient_dim")

    def __init__(self, vectors, ambient_dim: int | None = None, tol: float = DEFAULT_TOL):
        arr = np.asarray(vectors, dtype=complex)
        if arr.size == 0:
            if ambient_dim is None:
                raise ShapeError("an empty basis needs an explicit ambient dimension")
            arr = np.zeros((0, ambient_dim), dtype=complex)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.ndim != 2:
            raise ShapeError(f"basis must be a 2-d array of row vectors, got {arr.shape}")
        if ambient_dim is not None and arr.shape[1] != ambient_dim:
            raise ShapeError(f"basis vectors have dimension {arr.shape[1]}, expected {ambient_dim}")
        if not np.all(np.isfinite(arr)):
            raise InvariantError("basis has non-finite entries")
        gram = arr.conj() @ arr.T
        dev = np.max(np.abs(gram - np.eye(arr.shape[0]))) if arr.shape[0] else 0.0
        if dev >= tol:
            raise InvariantError(f"basis is not orthonormal (max deviation {dev:.3g})")
        self.vectors = frozen(arr)
        self.ambient_dim = int(arr.shape[1])

    def __len__(self):
        return self.vectors.shape[0]

    def __iter__(self):
        return iter(self.vectors)

    def __eq__(self, other):
        if not isinstance(other, OrthonormalBasis):
            return NotImplemented
        return self.vectors.shape == other.vectors.shape and bool(np.all(self.vectors == other.vectors))

    def __repr__(self):
        return f"OrthonormalBasis(k={len(self)}, d={self.ambient_dim})"

    def coefficients(self, v) -> np.ndarray:
        """Amplitudes ``<h_i|v>`` of a row vector along each basis vector."""
        return self.vectors.conj() @ np.asarray(v, dtype=complex)

    def projection_norm2(self, v) -> float:
        """``|v P|^2`` for the projector onto the span."""
        return float(np.sum(np.abs(self.coefficients(v)) ** 2))

    def direct_sum(self, other: OrthonormalBasis) -> OrthonormalBasis:
        d1, d2 = self.ambient_dim, other.ambient_dim
        rows = [np.concatenate([h, np.zeros(d2)]) for h in self.vectors]
        rows += [np.concatenate([np.zeros(d1), g]) for g in other.vectors]
        return OrthonormalBasis(rows, d1 + d2)

    def tensor(self, other: OrthonormalBasis) -> OrthonormalBasis:
        rows = [np.kron(h, g) for h in self.vectors for g in other.vectors]
        return OrthonormalBasis(rows, self.ambient_dim * other.ambient_dim)

    @classmethod
    def standard(cls, indices, ambient_dim: int) -> OrthonormalBasis:
        eye = np.eye(ambient_dim, dtype=complex)
        return cls([eye[i] for i in indices], ambient_dim)


def orthonormal_complement(basis: OrthonormalBasis, tol: float = DEFAULT_TOL) -> OrthonormalBasis:
    """Orthonormal basis of the subspace perpendicular to ``basis``.

    Gram-Schmidt (applied twice for stability) of the standard basis vectors
    against the input and the vectors found so far.
    """
    d = basis.ambient_dim
    found = [np.array(h) for h in basis.vectors]
    out = []
    for e in np.eye(d, dtype=complex):
        v = e.copy()
        for _ in range(2):
            for h in found:
                v = v - np.vdot(h, v) * h
        norm = np.linalg.norm(v)
        if norm > 1e-6:
            v = v / norm
            found.append(v)
            out.append(v)
        if len(found) == d:
            break
    if len(found) != d:
        raise InvariantError("basis is rank deficient; cannot complete it")
    return OrthonormalBasis(out, d, tol=tol) if out else OrthonormalBasis([], d)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_state(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)
