"""Dense complex linear algebra for the small Hilbert spaces of the experiment.

Vectors are 1-D ``complex128`` arrays and operators are 2-D ``complex128``
arrays. Every space used here has dimension at most 16, so nothing is sparse.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
import scipy.linalg

NORM_TOL = 1e-12
UNITARY_TOL = 1e-12
DENSITY_EIG_TOL = 1e-10
ISOMETRY_TOL = 1e-10
RANK_TOL = 1e-10


class NotIsometricError(ValueError):
    """Raised when a prescribed map does not preserve inner products."""


def as_vector(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.complex128)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"expected a non-empty 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite amplitudes")
    return v


def basis(dim: int, k: int) -> np.ndarray:
    """Unit vector ``e_k`` of a ``dim``-dimensional space."""
    e = np.zeros(dim, dtype=np.complex128)
    e[k] = 1.0
    return e


def inner(u, v) -> complex:
    """Return ``<u|v>``, antilinear in the first argument."""
    u = as_vector(u)
    v = as_vector(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.size} vs {v.size}")
    return complex(np.vdot(u, v))


def norm(v) -> float:
    return float(np.linalg.norm(as_vector(v)))


def normalize(v) -> tuple[np.ndarray, float]:
    """Return ``v / ||v||`` together with the applied correction ``||v|| - 1``."""
    v = as_vector(v)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return v / n, float(n - 1.0)


def is_normalized(v, tol: float = NORM_TOL) -> bool:
    return abs(np.vdot(v, v).real - 1.0) <= tol


def tensor(u, v) -> np.ndarray:
    """Kronecker product; index ``i * v.size + k`` holds ``u[i] * v[k]``."""
    return np.kron(as_vector(u), as_vector(v))


def outer(u, v=None) -> np.ndarray:
    """``|u><v|`` (``|u><u|`` when ``v`` is omitted)."""
    u = as_vector(u)
    v = u if v is None else as_vector(v)
    return np.outer(u, v.conj())


def dagger(m) -> np.ndarray:
    return np.asarray(m, dtype=np.complex128).conj().T


def unitarity_residual(m) -> float:
    """Max-entry norm of ``U^dagger U - I``."""
    m = np.asarray(m, dtype=np.complex128)
    return float(np.max(np.abs(dagger(m) @ m - np.eye(m.shape[1]))))


def is_unitary(m, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and unitarity_residual(m) <= tol


def is_density(m, tol: float = NORM_TOL) -> bool:
    """Hermitian, unit trace and positive semidefinite (eigenvalues >= -1e-10)."""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    if np.max(np.abs(m - dagger(m))) > tol:
        return False
    if abs(np.trace(m) - 1.0) > tol:
        return False
    return bool(np.min(np.linalg.eigvalsh(m)) >= -DENSITY_EIG_TOL)


def partial_trace_matrix(rho, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every tensor factor of ``rho`` whose index is not in ``keep``."""
    rho = np.asarray(rho, dtype=np.complex128)
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    keep = sorted(set(keep))
    if rho.shape != (int(np.prod(dims)),) * 2:
        raise ValueError(f"operator shape {rho.shape} does not match factor dims {dims}")
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"factor index out of range for dims {dims}")
    t = rho.reshape(dims + dims)
    # letters: row indices a.., column indices traced factors reuse the row letter
    row = [chr(ord("a") + i) for i in range(n)]
    col = [row[i] if i not in keep else chr(ord("A") + i) for i in range(n)]
    out = [row[i] for i in keep] + [col[i] for i in keep]
    spec = "".join(row) + "".join(col) + "->" + "".join(out)
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return np.einsum(spec, t).reshape(d_keep, d_keep)


def partial_trace(state, keep: str = "detector") -> np.ndarray:
    """Reduced density matrix of one part of a quanton-environment state.

    The two path states are taken as exactly orthogonal, so tracing over
    the quanton leaves ``sum_j |chi_j><chi_j|`` on the environment. ``keep``
    is ``"environment"``, or the name of one environment factor
    (``"detector"`` or ``"ancilla"``), in which case the remaining factors
    are traced out as well.
    """
    chi = np.asarray(state.chi, dtype=np.complex128)
    total = float(np.sum(np.abs(chi) ** 2))
    if abs(total - 1.0) > NORM_TOL:
        raise ValueError(f"state is not normalized (norm^2 = {total!r})")
    rho = chi.T @ chi.conj()
    if keep == "environment":
        return rho
    names = tuple(state.factor_names)
    if keep not in names:
        raise ValueError(f"state has no {keep!r} factor (factors: {names})")
    return partial_trace_matrix(rho, state.env_dims, [names.index(keep)])


def _pivoted_qr(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Full Q, permuted-back R and numerical rank of ``a``."""
    q, r, piv = scipy.linalg.qr(a, mode="full", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.sum(diag > RANK_TOL))
    r_unpermuted = np.empty_like(r)
    r_unpermuted[:, piv] = r
    return q, r_unpermuted[:rank], rank


def complete_unitary(pairs: Sequence[tuple[Sequence[complex], Sequence[complex]]]) -> np.ndarray:
    """Extend a partial isometry given as ``(input, output)`` pairs to a unitary.

    The input span is factored as ``A = Q R`` by column-pivoted QR; the
    outputs then determine an isometry ``V = B R^+`` on that span. Free
    columns map the orthogonal complement of the inputs onto the orthogonal
    complement of the outputs. A final polar step removes rounding drift
    from unitarity without moving the prescribed images.
    """
    if not pairs:
        raise ValueError("need at least one prescribed pair")
    a = np.column_stack([as_vector(p[0]) for p in pairs])
    b = np.column_stack([as_vector(p[1]) for p in pairs])
    if a.shape != b.shape:
        raise ValueError("inputs and outputs must share one dimension")
    gram_in = dagger(a) @ a
    gram_out = dagger(b) @ b
    mismatch = float(np.max(np.abs(gram_in - gram_out)))
    if mismatch > ISOMETRY_TOL:
        raise NotIsometricError(f"not isometric: inner products differ by {mismatch:.3e}")

    n = a.shape[0]
    q_in, r, rank = _pivoted_qr(a)
    if rank == 0:
        return np.eye(n, dtype=np.complex128)
    v = b @ np.linalg.pinv(r, rcond=RANK_TOL)
    q_out, _, _ = _pivoted_qr(v)
    full_out = np.hstack([v, q_out[:, rank:]])
    u = full_out @ dagger(q_in)
    w, _, vh = np.linalg.svd(u)
    return w @ vh
