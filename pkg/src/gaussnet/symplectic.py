r"""Dense symplectic primitives.

Phase-space coordinates are ordered :math:`(q_1, p_1, \ldots, q_n, p_n)` and
the symplectic form is the direct sum of :math:`n` copies of
``[[0, 1], [-1, 0]]``. Modes are addressed by 0-based index.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import (
    InvalidArgumentError,
    NotPhysicalError,
    NotSymmetricError,
    NotSymplecticError,
    PhysicalityError,
)

DEFAULT_TOL = 1e-9

DELTA = np.array([[0.0, 1.0], [-1.0, 0.0]])


def omega(n):
    """Return the ``2n x 2n`` symplectic form for ``n`` modes."""
    if int(n) != n or n < 1:
        raise InvalidArgumentError(f"mode count must be a positive integer, got {n!r}")
    return np.kron(np.eye(int(n)), DELTA)


def _square_even(M, what="matrix"):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidArgumentError(f"{what} must be square, got shape {M.shape}")
    if M.shape[0] % 2:
        raise InvalidArgumentError(f"{what} must have even dimension, got {M.shape[0]}")
    return M


def symplectic_defect(S):
    """Max-norm of ``S Omega S^T - Omega``."""
    S = _square_even(S)
    Om = omega(S.shape[0] // 2)
    return float(np.max(np.abs(S @ Om @ S.T - Om)))


def is_symplectic(S, tol=DEFAULT_TOL):
    return symplectic_defect(S) <= tol


def symplectic_inverse(S):
    r"""Inverse of a symplectic matrix, :math:`\Omega S^T \Omega^{-1}`."""
    S = _square_even(S)
    Om = omega(S.shape[0] // 2)
    return Om @ S.T @ Om.T


def validate_cm(cm, tol=DEFAULT_TOL):
    r"""Check that ``cm`` is a physical covariance matrix.

    The matrix must be symmetric within ``tol`` and satisfy the uncertainty
    relation :math:`\Gamma + i\Omega \geq 0`, tested through the smallest
    eigenvalue of that Hermitian matrix.

    Returns:
        numpy.ndarray: the symmetrized matrix.

    Raises:
        NotSymmetricError: asymmetry larger than ``tol``.
        NotPhysicalError: the uncertainty relation fails; ``eigenvalue``
            holds the offending eigenvalue.
    """
    cm = _square_even(cm, "covariance matrix")
    if not np.all(np.isfinite(cm)):
        raise PhysicalityError("covariance matrix has non-finite entries")
    asym = float(np.max(np.abs(cm - cm.T)))
    if asym > tol:
        raise NotSymmetricError(f"covariance matrix is not symmetric (max asymmetry {asym:.3e})")
    cm = 0.5 * (cm + cm.T)
    lowest = float(np.linalg.eigvalsh(cm + 1j * omega(cm.shape[0] // 2))[0])
    if lowest < -tol:
        raise NotPhysicalError(
            f"uncertainty relation violated: min eigenvalue of cm + i*Omega is {lowest:.6g}",
            eigenvalue=lowest,
        )
    return cm


def is_valid_cm(cm, tol=DEFAULT_TOL):
    try:
        validate_cm(cm, tol)
    except PhysicalityError:
        return False
    return True


def require_symplectic(S, tol=DEFAULT_TOL, what="matrix"):
    S = _square_even(S, what)
    defect = symplectic_defect(S)
    if defect > tol:
        raise NotSymplecticError(f"{what} is not symplectic (defect {defect:.3e} > {tol:g})")
    return S


@dataclass(frozen=True)
class GaussianUnitary:
    """Affine symplectic map ``(S, m)``: ``cm -> S cm S^T``, ``mean -> m + S mean``."""

    S: np.ndarray
    m: np.ndarray = field(default=None)

    def __post_init__(self):
        S = require_symplectic(self.S, what="unitary S")
        m = np.zeros(S.shape[0]) if self.m is None else np.asarray(self.m, dtype=float)
        if m.shape != (S.shape[0],):
            raise InvalidArgumentError(f"displacement must have length {S.shape[0]}, got {m.shape}")
        S.setflags(write=False)
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "m", m)

    @property
    def n(self):
        return self.S.shape[0] // 2

    def inverse(self):
        Sinv = symplectic_inverse(self.S)
        return GaussianUnitary(Sinv, -Sinv @ self.m)


def apply_unitary(state, u):
    """Apply a Gaussian unitary to a state and return the new state.

    The covariance matrix is re-symmetrized after the congruence.
    """
    from .states import GaussianState

    if not isinstance(u, GaussianUnitary):
        u = GaussianUnitary(u)
    if u.n != state.n:
        raise InvalidArgumentError(f"unitary acts on {u.n} modes but state has {state.n}")
    cm = u.S @ state.cm @ u.S.T
    return GaussianState(0.5 * (cm + cm.T), u.m + u.S @ state.mean)


def embed_two_mode(S4, modes, n):
    """Embed a 4x4 symplectic acting on ``modes = (i, j)`` into ``n`` modes.

    The 4x4 block acts on ``(q_i, p_i, q_j, p_j)`` in that order; every other
    mode sees the identity.
    """
    S4 = require_symplectic(np.asarray(S4, dtype=float), what="two-mode unitary")
    if S4.shape != (4, 4):
        raise InvalidArgumentError(f"two-mode unitary must be 4x4, got {S4.shape}")
    i, j = modes
    if i == j:
        raise InvalidArgumentError(f"two-mode operation needs distinct modes, got ({i}, {j})")
    for k in (i, j):
        if not 0 <= k < n:
            raise InvalidArgumentError(f"mode {k} out of range for {n} modes")
    idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
    S = np.eye(2 * n)
    S[np.ix_(idx, idx)] = S4
    return S


def local_symplectic(blocks):
    """Block-diagonal symplectic from a list of 2x2 unit-determinant blocks."""
    from scipy.linalg import block_diag

    return block_diag(*[np.asarray(b, dtype=float) for b in blocks])


def random_symplectic(n, seed):
    """Seeded random element of Sp(2n, R).

    Built as ``expm(Omega H)`` with ``H`` symmetric, entries uniform in
    ``[-0.5, 0.5]``; the exponent is Hamiltonian so the result is exactly
    symplectic up to rounding.
    """
    Om = omega(n)
    rng = np.random.default_rng(seed)
    H = 0.5 * rng.uniform(-1.0, 1.0, size=(2 * n, 2 * n))
    H = 0.5 * (H + H.T)
    return expm(Om @ H)


def williamson_single_mode(A):
    r"""Bring a positive 2x2 matrix to isotropic form.

    Returns ``(S1, nu)`` with ``det S1 = 1`` and ``S1 A S1^T = nu I``,
    ``nu = sqrt(det A)``. ``S1`` is the symmetric matrix
    :math:`\sqrt{\nu} A^{-1/2}`, so ``A = nu I`` gives ``S1 = I``.
    """
    A = np.asarray(A, dtype=float)
    if A.shape != (2, 2):
        raise InvalidArgumentError(f"expected a 2x2 matrix, got {A.shape}")
    A = 0.5 * (A + A.T)
    w, V = np.linalg.eigh(A)
    if w[0] <= 0:
        raise PhysicalityError(f"single-mode block is not positive definite (eigenvalues {w})")
    nu = float(np.sqrt(w[0] * w[1]))
    S1 = (V * np.sqrt(nu / w)) @ V.T
    return S1, nu
