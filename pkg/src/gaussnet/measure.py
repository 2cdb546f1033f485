r"""Genuine Gaussian quantum correlation (GGQC).

For a bipartition :math:`\alpha | \bar\alpha` of the modes,

.. math::
    M(\alpha) = 1 - \frac{\det\Gamma}{D(\alpha) D(\bar\alpha)},

where :math:`D` is the principal minor on the 2x2 blocks of the subset. The
GGQC is the minimum of :math:`M` over all bipartitions. Bipartitions are
identified by the bitmask of the side that contains mode 0 (bit ``k`` is
mode ``k``), which halves the enumeration and fixes report ordering.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, InvalidArgumentError
from .states import mode_indices

DEFAULT_MAX_MODES = 20
TIE_TOL = 1e-12
DEGENERATE_MINOR = 1e-12
_CHUNK = 4096


@dataclass(frozen=True)
class Bipartition:
    """A split of ``n`` modes; ``mask`` is the side containing mode 0."""

    mask: int
    n: int

    def __post_init__(self):
        full = (1 << self.n) - 1
        if not self.mask & 1 or self.mask >= full or self.mask <= 0:
            raise InvalidArgumentError(f"mask {self.mask:#b} is not a canonical bipartition of {self.n} modes")

    @classmethod
    def from_modes(cls, modes, n):
        mask = modes_to_mask(modes, n)
        if not mask & 1:
            mask ^= (1 << n) - 1
        return cls(mask, n)

    @property
    def modes(self):
        return mask_to_modes(self.mask, self.n)

    @property
    def complement(self):
        return mask_to_modes(((1 << self.n) - 1) ^ self.mask, self.n)


def modes_to_mask(modes, n):
    mask = 0
    for m in modes:
        m = int(m)
        if not 0 <= m < n:
            raise InvalidArgumentError(f"mode {m} out of range for {n} modes")
        mask |= 1 << m
    return mask


def mask_to_modes(mask, n):
    return tuple(k for k in range(n) if mask >> k & 1)


def enumerate_bipartitions(n, max_modes=DEFAULT_MAX_MODES):
    """All ``2**(n-1) - 1`` canonical bipartitions, ascending by bitmask."""
    if n < 2:
        raise InvalidArgumentError(f"bipartitions need at least 2 modes, got {n}")
    if n > max_modes:
        raise CapacityError(
            f"{n} modes exceeds the enumeration limit of {max_modes}; raise max_modes to proceed"
        )
    return [Bipartition(mask, n) for mask in range(1, (1 << n) - 1, 2)]


def principal_det(cm, modes):
    """Determinant of the principal submatrix on the 2x2 blocks of ``modes``.

    Uses LAPACK's partially pivoted LU through :func:`numpy.linalg.det`.
    """
    modes = list(modes)
    if not modes:
        raise InvalidArgumentError("principal minor needs a nonempty mode subset")
    idx = mode_indices(modes)
    cm = np.asarray(cm, dtype=float)
    value = float(np.linalg.det(cm[np.ix_(idx, idx)]))
    if value < DEGENERATE_MINOR:
        warnings.warn(f"principal minor {value:.3e} on modes {modes} is numerically degenerate", RuntimeWarning)
    return value


def _cm(state_or_cm):
    return np.asarray(getattr(state_or_cm, "cm", state_or_cm), dtype=float)


def m_value(state, modes):
    """Correlation ``M`` across the cut ``modes | rest``; symmetric in the two sides."""
    cm = _cm(state)
    n = cm.shape[0] // 2
    mask = modes_to_mask(modes, n)
    if mask == 0 or mask == (1 << n) - 1:
        raise InvalidArgumentError("cut must leave both sides nonempty")
    a = mask_to_modes(mask, n)
    b = mask_to_modes(((1 << n) - 1) ^ mask, n)
    return 1.0 - np.linalg.det(cm) / (principal_det(cm, a) * principal_det(cm, b))


def _batched_minors(cm, masks, n):
    """Principal minors for many equally sized subsets at once."""
    out = np.empty(len(masks))
    by_size = {}
    for pos, mask in enumerate(masks):
        by_size.setdefault(bin(mask).count("1"), []).append(pos)
    for size, positions in by_size.items():
        idx = np.array([mode_indices(mask_to_modes(masks[p], n)) for p in positions])
        for start in range(0, len(positions), _CHUNK):
            chunk = idx[start : start + _CHUNK]
            subs = cm[chunk[:, :, None], chunk[:, None, :]]
            out[np.array(positions[start : start + _CHUNK])] = np.linalg.det(subs)
    return out


@dataclass(frozen=True)
class GGQCRow:
    bipartition: Bipartition
    det_alpha: float
    det_complement: float
    value: float


@dataclass(frozen=True)
class GGQCReport:
    value: float
    argmin: Bipartition
    table: tuple
    det_gamma: float

    def to_dict(self, full_table=False):
        out = {
            "value": self.value,
            "argmin": [m + 1 for m in self.argmin.modes],
            "det_gamma": self.det_gamma,
        }
        if full_table:
            out["table"] = [
                {
                    "alpha": [m + 1 for m in row.bipartition.modes],
                    "mask": row.bipartition.mask,
                    "D_alpha": row.det_alpha,
                    "D_complement": row.det_complement,
                    "M": row.value,
                }
                for row in self.table
            ]
        return out


def ggqc(state, max_modes=DEFAULT_MAX_MODES):
    """Exhaustive GGQC of a state.

    Returns a :class:`GGQCReport` whose ``argmin`` is the lowest bitmask
    within ``1e-12`` of the minimum.
    """
    cm = _cm(state)
    n = cm.shape[0] // 2
    parts = enumerate_bipartitions(n, max_modes)
    full = (1 << n) - 1
    masks = [p.mask for p in parts]
    d_alpha = _batched_minors(cm, masks, n)
    d_comp = _batched_minors(cm, [full ^ m for m in masks], n)
    if min(d_alpha.min(), d_comp.min()) < DEGENERATE_MINOR:
        warnings.warn("numerically degenerate principal minor in GGQC evaluation", RuntimeWarning)
    det_gamma = float(np.linalg.det(cm))
    values = 1.0 - det_gamma / (d_alpha * d_comp)
    best = float(values.min())
    k = int(np.flatnonzero(values <= best + TIE_TOL)[0])
    table = tuple(
        GGQCRow(p, float(a), float(c), float(v)) for p, a, c, v in zip(parts, d_alpha, d_comp, values)
    )
    return GGQCReport(best, parts[k], table, det_gamma)


def closed_form_two_mode_pure(gamma):
    """``1 - 1/gamma**4`` for the standard-form two-mode pure state."""
    if gamma < 1:
        raise InvalidArgumentError(f"mixedness factor must be >= 1, got {gamma}")
    return 1.0 - gamma**-4


def closed_form_two_mode(a, b, c, d):
    """``1 - (ab - c^2)(ab - d^2) / (a b)^2`` for the two-mode standard form."""
    if a < 1 or b < 1:
        raise InvalidArgumentError(f"standard form needs a >= 1 and b >= 1, got a={a}, b={b}")
    ab = a * b
    return 1.0 - (ab - c * c) * (ab - d * d) / (ab * ab)


def closed_form_tritter(gamma):
    """``1 - 81 / (5 + 4 cosh 4 gamma)**2``."""
    if gamma < 0:
        raise InvalidArgumentError(f"squeezing must be >= 0, got {gamma}")
    return 1.0 - 81.0 / (5.0 + 4.0 * np.cosh(4.0 * gamma)) ** 2


def closed_form(kind, *params):
    """Analytic GGQC of a reference state: ``kind`` is one of
    ``"two_mode_pure"``, ``"two_mode_standard"`` or ``"tritter"``."""
    forms = {
        "two_mode_pure": closed_form_two_mode_pure,
        "two_mode_standard": closed_form_two_mode,
        "tritter": closed_form_tritter,
    }
    try:
        return float(forms[kind](*params))
    except KeyError:
        raise InvalidArgumentError(f"no closed form for {kind!r}") from None
