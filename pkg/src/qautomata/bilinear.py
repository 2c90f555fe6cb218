"""Bilinear-form representation of a QFA's acceptance function.

``f(w) = |s U_w P|^2`` is quadratic in the state; lifting to
``conj(s) (x) s`` makes it linear, and expanding each complex entry into a
2x2 real block makes it real.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import InvariantError
from .qfa import Qfa
from .words import as_word, check_word

IMAG_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class BilinearForm:
    """``f(w) = pi . M_{w_1} ... M_{w_n} . eta``."""

    pi: np.ndarray
    matrices: Mapping[str, np.ndarray]
    eta: np.ndarray
    kind: str = "complex"

    def __post_init__(self):
        if self.kind not in ("complex", "real"):
            raise InvariantError(f"unknown bilinear kind {self.kind!r}", field="kind")
        dtype = complex if self.kind == "complex" else float
        pi = np.asarray(self.pi)
        eta = np.asarray(self.eta)
        if self.kind == "real":
            for name, arr in [("pi", pi), ("eta", eta)] + [(f"matrices/{a}", m) for a, m in self.matrices.items()]:
                if np.iscomplexobj(arr) and np.any(np.asarray(arr).imag != 0):
                    raise InvariantError("real form has non-zero imaginary parts", field=name)
            pi, eta = pi.real, eta.real
        pi = np.array(pi, dtype=dtype)
        eta = np.array(eta, dtype=dtype)
        n = pi.shape[0]
        if pi.ndim != 1 or eta.shape != (n,):
            raise InvariantError("pi and eta must be vectors of the same dimension", field="eta")
        mats = {}
        for a, m in self.matrices.items():
            m = np.asarray(m)
            m = np.array(m.real if self.kind == "real" else m, dtype=dtype)
            if m.shape != (n, n):
                raise InvariantError(f"M_{a} has shape {m.shape}, expected {(n, n)}", field=f"matrices/{a}")
            m.setflags(write=False)
            mats[a] = m
        pi.setflags(write=False)
        eta.setflags(write=False)
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "matrices", mats)

    @property
    def dim(self) -> int:
        return self.pi.shape[0]

    @property
    def alphabet(self) -> tuple:
        return tuple(self.matrices)

    def value(self, w) -> complex:
        w = as_word(w)
        check_word(w, self.matrices)
        v = self.pi
        for a in w:
            v = v @ self.matrices[a]
        return v @ self.eta


def to_bilinear(q: Qfa) -> BilinearForm:
    """Complex form of dimension ``n^2``: ``pi = conj(s) (x) s``, ``M_a = conj(U_a) (x) U_a``.

    With amplitudes ``<h|v> = sum_j conj(h_j) v_j`` the accepting vector is
    ``eta = sum_i h_i (x) conj(h_i)``.
    """
    n = q.dim
    eta = np.zeros(n * n, dtype=complex)
    for h in q.accept_basis.vectors:
        eta += np.kron(h, h.conj())
    return BilinearForm(
        pi=np.kron(q.s_init.conj(), q.s_init),
        matrices={a: np.kron(u.conj(), u) for a, u in q.transitions.items()},
        eta=eta,
        kind="complex",
    )


def complex_block(c: complex) -> np.ndarray:
    """``a + bi -> [[a, b], [-b, a]]``."""
    return np.array([[c.real, c.imag], [-c.imag, c.real]])


def realify(m: np.ndarray) -> np.ndarray:
    """Replace every complex entry of a matrix by its 2x2 real block."""
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    r, c = m.shape
    out = np.empty((2 * r, 2 * c))
    out[0::2, 0::2] = m.real
    out[0::2, 1::2] = m.imag
    out[1::2, 0::2] = -m.imag
    out[1::2, 1::2] = m.real
    return out


def to_real(b: BilinearForm) -> BilinearForm:
    """Real form of dimension ``2 * dim``; evaluates to ``Re`` of the complex form."""
    if b.kind != "complex":
        raise InvariantError("to_real expects a complex form", field="kind")
    pi_block = realify(b.pi[None, :])  # 2 x 2N
    eta_block = realify(b.eta[:, None])  # 2N x 2
    return BilinearForm(
        pi=pi_block[0],
        matrices={a: realify(m) for a, m in b.matrices.items()},
        eta=eta_block[:, 0],
        kind="real",
    )


def eval_bilinear(b: BilinearForm, w, check_imag: bool = True) -> float:
    """Real value of the form on ``w``.

    For a complex form built from a QFA the imaginary part must vanish; with
    ``check_imag`` a non-negligible imaginary part raises.
    """
    val = b.value(w)
    if b.kind == "complex":
        if check_imag and abs(val.imag) >= IMAG_TOL:
            raise InvariantError(f"form value has imaginary part {val.imag:.3g}")
        return float(val.real)
    return float(val)
