"""Dense complex algebra for small qubit registers.

Vectors and operators are plain numpy arrays with dtype complex128.
Register dimensions are powers of two up to 16; dimension 1 is admitted
as the trivial (absent) ancilla factor.  In tensor products the leftmost
factor is the most significant index, matching numpy.kron.

Two tolerance regimes are used throughout the package: ATOL_STATE for
algebraic self-checks (normalization, hermiticity, orthogonality of
constructed data) and the looser ATOL_VERDICT for yes/no decisions about
measured quantities.  Both can be overridden per call.
"""

from __future__ import annotations

import numpy as np

SUPPORTED_DIMS = (1, 2, 4, 8, 16)

ATOL_STATE = 1e-12
ATOL_VERDICT = 1e-9


def _as_complex(values, what: str) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite entries")
    return arr


def state_vector(amplitudes, normalized: bool = True, atol: float = ATOL_STATE) -> np.ndarray:
    """Validated copy of a state vector.

    Rejects non-finite amplitudes and unsupported dimensions.  With
    normalized=True (the default) the norm must already be 1 within
    atol; nothing is rescaled here.
    """
    v = _as_complex(amplitudes, "state vector")
    if v.ndim != 1 or v.size not in SUPPORTED_DIMS:
        raise ValueError(f"unsupported state dimension {v.shape}")
    if normalized and abs(np.linalg.norm(v) - 1.0) > atol:
        raise ValueError(f"state vector is not normalized (norm {np.linalg.norm(v)!r})")
    return v


def operator(entries) -> np.ndarray:
    """Validated copy of a square operator on a supported dimension."""
    m = _as_complex(entries, "operator")
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in SUPPORTED_DIMS:
        raise ValueError(f"unsupported operator shape {m.shape}")
    return m


def ket(index: int, dim: int = 2) -> np.ndarray:
    """Computational basis vector |index> in the given dimension."""
    if dim not in SUPPORTED_DIMS:
        raise ValueError(f"unsupported dimension {dim}")
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for dimension {dim}")
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def inner_product(u, v) -> complex:
    """<u|v>, conjugate-linear in the first argument."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise ValueError(f"shape mismatch {u.shape} vs {v.shape}")
    return complex(np.vdot(u, v))


def tensor(*factors) -> np.ndarray:
    """Kronecker product of states or operators, leftmost factor most significant."""
    if not factors:
        raise ValueError("tensor of nothing")
    out = np.asarray(factors[0], dtype=complex)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=complex))
    size = out.shape[0]
    if size not in SUPPORTED_DIMS:
        raise ValueError(f"resulting dimension {size} unsupported")
    return out


def apply(op, v) -> np.ndarray:
    """Apply an operator to a vector.  The result is never renormalized,
    so a non-isometric op leaves a visible norm defect."""
    op = np.asarray(op, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if op.ndim != 2 or op.shape[1] != v.shape[0]:
        raise ValueError(f"cannot apply {op.shape} to {v.shape}")
    return op @ v


def is_unitary(op, atol: float = ATOL_VERDICT) -> bool:
    """True when op† op = I within atol (max-entry norm)."""
    op = np.asarray(op, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        return False
    gram = op.conj().T @ op
    return bool(np.max(np.abs(gram - np.eye(op.shape[0]))) <= atol)


def pure_density(v) -> np.ndarray:
    """|v><v| for a state vector v."""
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def density_operator(entries, atol: float = ATOL_STATE) -> np.ndarray:
    """Validated density matrix: hermitian, unit trace, positive semidefinite."""
    rho = operator(entries)
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise ValueError("density operator is not hermitian")
    if abs(np.trace(rho).real - 1.0) > atol or abs(np.trace(rho).imag) > atol:
        raise ValueError("density operator trace is not 1")
    # eigvalsh is exact enough here; tiny negative values within atol pass
    if np.min(np.linalg.eigvalsh(rho)) < -atol:
        raise ValueError("density operator has a negative eigenvalue")
    return rho


def fidelity_pure_mixed(ideal, rho) -> float:
    """<ideal| rho |ideal> as a real number clipped to [0, 1]."""
    ideal = np.asarray(ideal, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (ideal.size, ideal.size):
        raise ValueError(f"shape mismatch {rho.shape} vs state of dim {ideal.size}")
    val = complex(np.vdot(ideal, rho @ ideal))
    if abs(val.imag) > 1e-10 or val.real < -1e-10 or val.real > 1.0 + 1e-10:
        raise ValueError(f"fidelity {val!r} outside the valid range")
    return float(min(max(val.real, 0.0), 1.0))


def partial_trace(rho, keep, dims) -> np.ndarray:
    """Trace out every factor not listed in keep.

    dims gives the factor dimensions of rho, most significant first.
    The kept factors stay in their original relative order.
    """
    rho = np.asarray(rho, dtype=complex)
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ValueError(f"dims {dims} do not match operator shape {rho.shape}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {n} factors")
    resh = rho.reshape(dims + dims)
    row = list(range(n))
    col = [i + n if i in keep else i for i in range(n)]
    out = [i for i in keep] + [i + n for i in keep]
    reduced = np.einsum(resh, row + col, out)
    d = int(np.prod([dims[i] for i in keep])) if keep else 1
    return reduced.reshape(d, d)


def equal_up_to_phase(u, v, atol: float = ATOL_STATE) -> bool:
    """True when u and v describe the same ray: |<u|v>| = |u||v| within atol."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("zero vector has no ray")
    return bool(abs(abs(np.vdot(u, v)) / (nu * nv) - 1.0) <= atol)


class AntiUnitaryMap:
    """Antiunitary action v -> U conj(v) for a fixed unitary part U."""

    def __init__(self, unitary_part) -> None:
        u = operator(unitary_part)
        if not is_unitary(u, ATOL_STATE):
            raise ValueError("the unitary part of an antiunitary map must be unitary")
        self.unitary_part = u

    @property
    def dim(self) -> int:
        return self.unitary_part.shape[0]

    def __call__(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        return self.unitary_part @ v.conj()

    def __repr__(self) -> str:
        return f"AntiUnitaryMap(dim={self.dim})"


def conjugation(dim: int = 2) -> AntiUnitaryMap:
    """Plain componentwise conjugation in the computational basis."""
    return AntiUnitaryMap(np.eye(dim))


def complement_map() -> AntiUnitaryMap:
    """The antiunitary sending alpha|0>+beta|1> to conj(alpha)|1>-conj(beta)|0>."""
    return AntiUnitaryMap(np.array([[0.0, -1.0], [1.0, 0.0]]))


class GeneralKMap:
    """Weighted mix of a unitary and an antiunitary action on one qubit.

    K v = sqrt(lam) U v + sqrt(1-lam) A v with lam in [0, 1].  The
    endpoints collapse exactly to the pure unitary (lam=1) or pure
    antiunitary (lam=0) action.
    """

    def __init__(self, lam: float, unitary=None, antiunitary: AntiUnitaryMap | None = None) -> None:
        lam = float(lam)
        if not 0.0 <= lam <= 1.0:
            raise ValueError(f"lam must lie in [0, 1], got {lam!r}")
        self.lam = lam
        self.unitary = operator(unitary) if unitary is not None else np.eye(2, dtype=complex)
        if not is_unitary(self.unitary, ATOL_STATE):
            raise ValueError("the unitary part must be unitary")
        self.antiunitary = antiunitary if antiunitary is not None else complement_map()
        if self.antiunitary.dim != self.unitary.shape[0]:
            raise ValueError("unitary and antiunitary parts act on different dimensions")

    def __call__(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        out = np.zeros_like(v)
        if self.lam > 0.0:
            out = out + np.sqrt(self.lam) * (self.unitary @ v)
        if self.lam < 1.0:
            out = out + np.sqrt(1.0 - self.lam) * self.antiunitary(v)
        return out

    def __repr__(self) -> str:
        return f"GeneralKMap(lam={self.lam!r})"


def haar_unitaries(n: int, dim: int = 2, seed: int | None = None,
                   rng: np.random.Generator | None = None) -> np.ndarray:
    """Stack of n Haar-distributed dim x dim unitaries, shape (n, dim, dim).

    QR of a complex Gaussian matrix with the R-diagonal phases folded
    back in, which removes the sign/phase bias of raw QR.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    z = (rng.standard_normal((n, dim, dim)) + 1j * rng.standard_normal((n, dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=1, axis2=2).copy()
    d = d / np.abs(d)
    return q * d[:, np.newaxis, :]
