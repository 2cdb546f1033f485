"""Gaussian states at the covariance-matrix level and the reference constructors."""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag

from .errors import InvalidArgumentError
from .symplectic import DEFAULT_TOL, random_symplectic, validate_cm


@dataclass(frozen=True, eq=False)
class GaussianState:
    """An ``n``-mode Gaussian state given by its covariance matrix and mean.

    Both arrays are copied, validated and made read-only on construction.
    """

    cm: np.ndarray
    mean: np.ndarray = field(default=None)
    tol: float = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        cm = validate_cm(np.array(self.cm, dtype=float), self.tol)
        mean = np.zeros(cm.shape[0]) if self.mean is None else np.array(self.mean, dtype=float)
        if mean.shape != (cm.shape[0],):
            raise InvalidArgumentError(f"mean must have length {cm.shape[0]}, got shape {mean.shape}")
        if not np.all(np.isfinite(mean)):
            raise InvalidArgumentError("mean has non-finite entries")
        cm.setflags(write=False)
        mean.setflags(write=False)
        object.__setattr__(self, "cm", cm)
        object.__setattr__(self, "mean", mean)

    @property
    def n(self):
        return self.cm.shape[0] // 2

    def block(self, i, j=None):
        """The 2x2 block between modes ``i`` and ``j`` (``j`` defaults to ``i``)."""
        j = i if j is None else j
        return self.cm[2 * i : 2 * i + 2, 2 * j : 2 * j + 2]

    def __repr__(self):
        return f"GaussianState(n={self.n})"


C2 = np.diag([1.0, -1.0])


def two_mode_pure(gamma):
    """Two-mode pure state in standard form with single-mode mixedness ``gamma``."""
    if gamma < 1:
        raise InvalidArgumentError(f"mixedness factor must be >= 1, got {gamma}")
    s = np.sqrt(gamma * gamma - 1.0)
    cm = np.block([[gamma * np.eye(2), s * C2], [s * C2, gamma * np.eye(2)]])
    return GaussianState(cm)


def two_mode_standard(a, b, c, d):
    """Two-mode state in standard form ``[[a I, diag(c, d)], [diag(c, d), b I]]``.

    Raises NotPhysicalError when the parameters violate the uncertainty relation.
    """
    if a < 1 or b < 1:
        raise InvalidArgumentError(f"standard form needs a >= 1 and b >= 1, got a={a}, b={b}")
    C = np.diag([float(c), float(d)])
    cm = np.block([[a * np.eye(2), C], [C, b * np.eye(2)]])
    return GaussianState(cm)


def tritter_coefficients(gamma):
    """The ``(R_plus, R_minus, S)`` entries of the tritter covariance matrix."""
    ch, sh = np.cosh(2 * gamma), np.sinh(2 * gamma)
    return ch + sh / 3.0, ch - sh / 3.0, -2.0 * sh / 3.0


def tritter_state(gamma):
    """Three single-mode squeezed vacua mixed on a symmetric tritter.

    ``gamma`` is the squeezing strength; only ``gamma >= 0`` is accepted.
    """
    if gamma < 0:
        raise InvalidArgumentError(f"squeezing must be >= 0, got {gamma}")
    rp, rm, s = tritter_coefficients(gamma)
    diag = np.diag([rp, rm])
    off = np.diag([s, -s])
    cm = np.block([[diag if i == j else off for j in range(3)] for i in range(3)])
    return GaussianState(cm)


def tensor(*states):
    """Tensor product: block-diagonal covariance matrix, concatenated means."""
    if not states:
        raise InvalidArgumentError("tensor needs at least one state")
    return GaussianState(
        block_diag(*[s.cm for s in states]),
        np.concatenate([s.mean for s in states]),
    )


def mode_indices(modes):
    return [k for m in modes for k in (2 * m, 2 * m + 1)]


def _check_modes(modes, n, allow_empty=False):
    modes = [int(m) for m in modes]
    if not modes and not allow_empty:
        raise InvalidArgumentError("mode subset must be nonempty")
    if len(set(modes)) != len(modes):
        raise InvalidArgumentError(f"duplicate modes in {modes}")
    for m in modes:
        if not 0 <= m < n:
            raise InvalidArgumentError(f"mode {m} out of range for {n} modes")
    return modes


def reduce(state, modes):
    """Reduced state on ``modes`` (partial trace at the covariance level).

    Modes keep the order given; pass a sorted subset for the natural ordering.
    """
    modes = _check_modes(modes, state.n)
    idx = mode_indices(modes)
    return GaussianState(state.cm[np.ix_(idx, idx)], state.mean[idx])


def permute(state, perm):
    """Relabel modes: mode ``k`` of the input becomes mode ``perm[k]`` of the output."""
    perm = _check_modes(perm, state.n)
    if len(perm) != state.n:
        raise InvalidArgumentError("permutation must list every mode once")
    order = np.argsort(perm)
    idx = mode_indices(order)
    return GaussianState(state.cm[np.ix_(idx, idx)], state.mean[idx])


def random_state(n, seed, pure=False):
    """Seeded random ``n``-mode state ``S (+) nu_k I S^T``.

    ``nu_k`` are uniform in ``[1, 3]`` (all 1 when ``pure``) and ``S`` is
    :func:`random_symplectic` with the same seed.
    """
    S = random_symplectic(n, seed)
    nu = np.ones(n) if pure else np.random.default_rng([seed, 1]).uniform(1.0, 3.0, size=n)
    cm = S @ np.diag(np.repeat(nu, 2)) @ S.T
    return GaussianState(0.5 * (cm + cm.T))
