r"""Normal forms of Sp(4, R) under local symplectic multiplication.

Every ``S`` in Sp(4, R) can be brought to one of six canonical matrices by
``L S R`` with ``L = L_1 (+) L_2`` and ``R = R_1 (+) R_2`` block diagonal,
each block a 2x2 matrix of unit determinant. The branch is fixed by
``delta = det S_11``, which is invariant under local multiplication:

============  =================  ===========================
type          branch             parameter
============  =================  ===========================
``I``         delta > 1          lambda = sqrt(delta - 1)
``VI``        0 < delta < 1      lambda = sqrt(1 - delta)
``II``        delta < 0          lambda = sqrt(1 - delta)
``III``       delta = 1          largest singular value of S_12
``IV``        delta = 0          see :func:`_reduce_rank_one`
``V``         S_11 = 0           none
============  =================  ===========================
"""

from dataclasses import dataclass

import numpy as np

from .errors import ClassificationError, InvalidArgumentError, NotSymplecticError
from .symplectic import DELTA, symplectic_defect

TOL_BRANCH = 1e-7
MIN_DIVISOR = 1e-10
RESIDUAL_BOUND = 1e-6

KINDS = ("I", "II", "III", "IV", "V", "VI")
_NPARAMS = {"I": 1, "II": 1, "III": 1, "IV": 2, "V": 0, "VI": 1}
_C = np.diag([1.0, -1.0])
_I2 = np.eye(2)


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def special_svd_2x2(M):
    """SVD of a real 2x2 matrix with unit-determinant orthogonal factors.

    Returns ``(U, sigma, V)`` with ``U``, ``V`` rotations and
    ``U @ M @ V == diag(sigma)``, so ``M = U.T @ diag(sigma) @ V.T``.
    ``sigma[0] >= |sigma[1]|``, ``sigma[0] >= 0`` and
    ``sigma[0] * sigma[1] == det M``; a negative determinant shows up as
    the sign of ``sigma[1]``. Diagonal input that already satisfies these
    conditions gives identity factors.
    """
    M = np.asarray(M, dtype=float)
    if M.shape != (2, 2):
        raise InvalidArgumentError(f"expected a 2x2 matrix, got {M.shape}")
    a, d = M[0, 0], M[1, 1]
    if M[0, 1] == 0.0 and M[1, 0] == 0.0 and a >= abs(d):
        return _I2.copy(), np.array([a, d]), _I2.copy()
    W, s, Vt = np.linalg.svd(M)
    # M = W diag(s) Vt, so W.T M Vt.T = diag(s); flip signs to land in SO(2).
    U, V = W.T, Vt.T
    if np.linalg.det(U) < 0:
        U = _C @ U
        s = s * np.array([1.0, -1.0])
    if np.linalg.det(V) < 0:
        V = V @ _C
        s = s * np.array([1.0, -1.0])
    return U, s, V


@dataclass(frozen=True)
class CanonicalForm:
    """One of the six normal forms with its real parameters."""

    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"unknown canonical type {self.kind!r}")
        params = tuple(float(p) for p in np.atleast_1d(self.params)) if self.params != () else ()
        if len(params) != _NPARAMS[self.kind]:
            raise InvalidArgumentError(
                f"type {self.kind} takes {_NPARAMS[self.kind]} parameter(s), got {len(params)}"
            )
        object.__setattr__(self, "params", params)
        _check_domain(self.kind, params)

    @property
    def lam(self):
        return self.params[0] if self.params else None

    def to_dict(self):
        return {"type": self.kind, "params": list(self.params)}


def _check_domain(kind, params):
    if kind == "I" and not params[0] > 0:
        raise InvalidArgumentError(f"type I needs lambda > 0, got {params[0]}")
    if kind == "II" and not params[0] > 1:
        raise InvalidArgumentError(f"type II needs lambda > 1, got {params[0]}")
    if kind == "VI" and not 0 < params[0] < 1:
        raise InvalidArgumentError(f"type VI needs 0 < lambda < 1, got {params[0]}")
    if kind == "IV":
        l1, l2 = params
        # The type IV matrix is symplectic only on this line.
        if abs(l1 + l2) > 1e-12 * max(1.0, abs(l1)):
            raise InvalidArgumentError(f"type IV needs lambda2 = -lambda1, got ({l1}, {l2})")
    if not all(np.isfinite(params)):
        raise InvalidArgumentError("canonical parameters must be finite")


def canonical_array(kind, *params):
    """The canonical 4x4 matrix without domain checks (used at domain edges)."""
    if kind == "I":
        (lam,) = params
        c = np.sqrt(lam * lam + 1.0)
        return np.block([[c * _I2, lam * _C], [lam * _C, c * _I2]])
    if kind == "II":
        (lam,) = params
        c = np.sqrt(max(lam * lam - 1.0, 0.0))
        return np.block([[c * _C, lam * _I2], [lam * _I2, c * _C]])
    if kind == "III":
        (lam,) = params
        return np.array([[1, 0, lam, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, -lam, 0, 1]], dtype=float)
    if kind == "IV":
        l1, l2 = params
        return np.array([[l1, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, l2]], dtype=float)
    if kind == "V":
        return np.block([[np.zeros((2, 2)), _I2], [-_I2, np.zeros((2, 2))]])
    if kind == "VI":
        (lam,) = params
        c = np.sqrt(max(1.0 - lam * lam, 0.0))
        return np.block([[c * _I2, lam * _I2], [-lam * _I2, c * _I2]])
    raise InvalidArgumentError(f"unknown canonical type {kind!r}")


def canonical_matrix(form):
    """The canonical 4x4 symplectic matrix of ``form``."""
    return canonical_array(form.kind, *form.params)


@dataclass(frozen=True)
class ClassificationResult:
    form: CanonicalForm
    L: np.ndarray
    R: np.ndarray
    residual: float
    det_s11: float

    def to_dict(self):
        return {
            "type": self.form.kind,
            "params": list(self.form.params),
            "L": self.L.tolist(),
            "R": self.R.tolist(),
            "residual": self.residual,
            "det_s11": self.det_s11,
        }


def _blocks(S):
    return S[:2, :2], S[:2, 2:], S[2:, :2], S[2:, 2:]


class _Local:
    """Accumulates ``L`` and ``R`` while transforming ``S`` in place."""

    def __init__(self, S):
        self.S = S.copy()
        self.L = np.eye(4)
        self.R = np.eye(4)

    def apply(self, l1=_I2, l2=_I2, r1=_I2, r2=_I2):
        Lk = np.block([[l1, np.zeros((2, 2))], [np.zeros((2, 2)), l2]])
        Rk = np.block([[r1, np.zeros((2, 2))], [np.zeros((2, 2)), r2]])
        self.S = Lk @ self.S @ Rk
        self.L = Lk @ self.L
        self.R = self.R @ Rk

    @property
    def blocks(self):
        return _blocks(self.S)


def _diagonalize_blocks(t):
    """Both diagonal blocks to ``diag(sigma1, sigma2)`` by rotations."""
    S11, _, _, S22 = t.blocks
    U1, s1, V1 = special_svd_2x2(S11)
    U2, s2, V2 = special_svd_2x2(S22)
    t.apply(l1=U1, l2=U2, r1=V1, r2=V2)
    return s1, s2


def _reduce_generic(t, delta):
    """det S_11 away from 0 and 1: ends in type I, II or VI."""
    s1, s2 = _diagonalize_blocks(t)
    if min(abs(s1[1]), abs(s2[1])) < MIN_DIVISOR:
        return None
    # Scale both diagonal blocks to sqrt|delta| diag(1, sign delta).
    k1 = np.sqrt(abs(s1[1] / s1[0]))
    k2 = np.sqrt(abs(s2[1] / s2[0]))
    t.apply(l1=np.diag([k1, 1 / k1]), l2=np.diag([k2, 1 / k2]))
    E = np.diag([1.0, np.sign(delta)])
    # Rotations Q on block 1 and P on block 2, compensated on the right by
    # E Q^T E and E P^T E, keep the diagonal blocks and rotate S_12 E.
    _, S12, _, _ = t.blocks
    U, beta, V = special_svd_2x2(S12 @ E)
    t.apply(l1=U, l2=V.T, r1=E @ U.T @ E, r2=E @ V @ E)
    if abs(beta[1]) < MIN_DIVISOR:
        return None
    # Equalize the magnitudes of the S_12 diagonal; diagonal scalings on
    # both sides leave the diagonal blocks untouched.
    k = abs(beta[1] / beta[0]) ** 0.25
    t.apply(l1=np.diag([k, 1 / k]), l2=np.diag([1 / k, k]), r1=np.diag([1 / k, k]), r2=np.diag([k, 1 / k]))
    lam = float(np.sqrt(abs(1.0 - delta)))
    if delta > 1:
        return CanonicalForm("I", (lam,))
    if delta > 0:
        return CanonicalForm("VI", (lam,))
    return CanonicalForm("II", (lam,))


def _reduce_unit(t):
    """det S_11 = 1: type III."""
    s1, s2 = _diagonalize_blocks(t)
    if min(abs(s1[1]), abs(s2[1])) < MIN_DIVISOR:
        return None
    k1 = np.sqrt(abs(s1[1] / s1[0]))
    k2 = np.sqrt(abs(s2[1] / s2[0]))
    t.apply(l1=np.diag([k1, 1 / k1]), l2=np.diag([k2, 1 / k2]))
    _, S12, _, _ = t.blocks
    U, beta, V = special_svd_2x2(S12)
    t.apply(l1=U, l2=V.T, r1=U.T, r2=V)
    return CanonicalForm("III", (float(beta[0]),))


def _reduce_rank_one(t):
    r"""det S_11 = 0 with S_11 != 0: type IV.

    After diagonalization ``S_11 = diag(p, 0)`` and ``S_22 = diag(q, 0)``;
    a quarter turn on block 2 makes ``S_22 = diag(0, q)``, after which
    symplecticity forces ``S_12`` upper and ``S_21`` lower triangular with
    unit determinant. Right multiplication by their inverses sets both to
    the identity and leaves ``S_11 = diag(mu, 0)``, ``S_22 = diag(0, -mu)``.
    """
    s1, s2 = _diagonalize_blocks(t)
    if min(s1[0], s2[0]) < MIN_DIVISOR:
        return None
    t.apply(l2=DELTA, r2=DELTA.T)
    _, S12, S21, _ = t.blocks
    if min(abs(np.linalg.det(S12)), abs(np.linalg.det(S21))) < MIN_DIVISOR:
        return None
    r1 = np.linalg.inv(S21)
    r2 = np.linalg.inv(S12)
    r1 /= np.sqrt(abs(np.linalg.det(r1)))
    r2 /= np.sqrt(abs(np.linalg.det(r2)))
    t.apply(r1=r1, r2=r2)
    if t.S[0, 0] < 0:
        # (-I (+) I) S (I (+) -I) flips S_11 and S_22 and keeps S_12, S_21.
        t.apply(l1=-_I2, r2=-_I2)
    mu = float(t.S[0, 0])
    return CanonicalForm("IV", (mu, -mu))


def _reduce_zero(t):
    """S_11 = 0: type V via R = (-S_21^{-1}) (+) S_12^{-1}."""
    _, S12, S21, _ = t.blocks
    if min(abs(np.linalg.det(S12)), abs(np.linalg.det(S21))) < MIN_DIVISOR:
        return None
    r1 = -np.linalg.inv(S21)
    r2 = np.linalg.inv(S12)
    r1 /= np.sqrt(abs(np.linalg.det(r1)))
    r2 /= np.sqrt(abs(np.linalg.det(r2)))
    t.apply(r1=r1, r2=r2)
    return CanonicalForm("V")


def _branch_order(S11, delta, tol_branch):
    if np.max(np.abs(S11)) <= tol_branch:
        return ["V", "IV"]
    if abs(delta) <= tol_branch:
        return ["IV", "V", "generic"]
    if abs(delta - 1.0) <= tol_branch:
        return ["III", "generic"]
    # Tiny divisors inside the generic route fall back to the nearer degenerate branch.
    return ["generic", "IV" if abs(delta) < abs(delta - 1.0) else "III"]


def classify(S, tol=1e-9, tol_branch=TOL_BRANCH, residual_bound=RESIDUAL_BOUND):
    """Classify ``S`` in Sp(4, R) into its canonical type.

    Returns a :class:`ClassificationResult` with ``L @ S @ R`` equal to the
    canonical matrix up to ``result.residual``.

    Raises:
        NotSymplecticError: ``S`` fails the symplectic check at ``tol``.
        ClassificationError: no branch reaches ``residual_bound``.
    """
    S = np.asarray(S, dtype=float)
    if S.shape != (4, 4):
        raise InvalidArgumentError(f"expected a 4x4 matrix, got {S.shape}")
    defect = symplectic_defect(S)
    if defect > tol:
        raise NotSymplecticError(f"matrix is not symplectic (defect {defect:.3e} > {tol:g})")
    S11 = S[:2, :2]
    delta = float(np.linalg.det(S11))
    best = None
    for branch in _branch_order(S11, delta, tol_branch):
        t = _Local(S)
        if branch == "generic":
            form = _reduce_generic(t, delta)
        elif branch == "III":
            form = _reduce_unit(t)
        elif branch == "IV":
            form = _reduce_rank_one(t)
        else:
            form = _reduce_zero(t)
        if form is None:
            continue
        result = ClassificationResult(form, t.L, t.R, 0.0, delta)
        residual = verify_classification(S, result)
        result = ClassificationResult(form, t.L, t.R, residual, delta)
        if best is None or residual < best.residual:
            best = result
        if residual <= residual_bound:
            return result
    if best is None:
        raise ClassificationError(f"no reduction applies (det S11 = {delta:.3e})")
    raise ClassificationError(
        f"classification residual {best.residual:.3e} exceeds {residual_bound:g} (det S11 = {delta:.3e})"
    )


def block_defect(M):
    """Largest entry of ``M`` outside its two diagonal 2x2 blocks."""
    return float(max(np.max(np.abs(M[:2, 2:])), np.max(np.abs(M[2:, :2]))))


def verify_classification(S, result):
    """Recompute the worst defect of a classification.

    The maximum of ``|L S R - canonical|_max``, the off-block entries of
    ``L`` and ``R`` and their symplectic defects.
    """
    S = np.asarray(S, dtype=float)
    target = canonical_matrix(result.form)
    return float(
        max(
            np.max(np.abs(result.L @ S @ result.R - target)),
            block_defect(result.L),
            block_defect(result.R),
            symplectic_defect(result.L),
            symplectic_defect(result.R),
        )
    )


def symplectic_block_identities(S):
    """Defects of the block identities every 4x4 symplectic obeys.

    Returns a dict of absolute defects for ``det S11 + det S12 = 1``,
    ``det S21 + det S22 = 1``, ``S11 D S21^T + S12 D S22^T = 0``,
    ``det S11 = det S22`` and ``det S12 = det S21``.
    """
    S11, S12, S21, S22 = _blocks(np.asarray(S, dtype=float))
    det = np.linalg.det
    return {
        "row1_dets": abs(det(S11) + det(S12) - 1.0),
        "row2_dets": abs(det(S21) + det(S22) - 1.0),
        "cross": float(np.max(np.abs(S11 @ DELTA @ S21.T + S12 @ DELTA @ S22.T))),
        "diag_dets": abs(det(S11) - det(S22)),
        "offdiag_dets": abs(det(S12) - det(S21)),
    }
