r"""Generating multimode states from independent sources.

A network is a list of sources, each an independent Gaussian state, and an
ordered list of two-mode Gaussian unitaries applied at intermediate nodes.
The initial state is the tensor product of the sources. For any choice of
unitaries the GGQC of the result never exceeds the smallest source GGQC,
and suitably strong two-mode operations reach that value.

Design rules for the two-mode operation, with ``g1`` the isotropic
mixedness of the first (outgoing) mode and ``g2`` that of the second
(incoming) mode after local standardization:

``"table"``
    The closed-form threshold table for rows I-IV, as tabulated.
``"condition"``
    Thresholds solved exactly from the determinant inequality
    ``g1^4 g2^2 <= det(g1 S11 S11^T + g2 S12 S12^T) det(g1 S21 S21^T + g2 S22 S22^T)``
    (see :func:`check_sufficiency`). Identical to ``"table"`` for rows I, II and IV.
``"attain"``
    Type I only, ``lambda^2 = (max(g1, g2) - 1) / (g1 g2 + 1)``: the value at
    which the cut separating the two merged parts stops limiting the GGQC of
    pure sources.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .classify import CanonicalForm, canonical_array
from .errors import InvalidArgumentError
from .measure import DEFAULT_MAX_MODES, ggqc
from .states import (
    GaussianState,
    tensor,
    tritter_state,
    two_mode_pure,
    two_mode_standard,
    random_state,
)
from .symplectic import DEFAULT_TOL, GaussianUnitary, apply_unitary, embed_two_mode, williamson_single_mode

log = logging.getLogger(__name__)

DEFAULT_MARGIN = 1e-6
RULES = ("table", "condition", "attain")
SUFFICIENCY_RTOL = 1e-12
_C = np.diag([1.0, -1.0])


# -- sources and operations -------------------------------------------------

_SOURCE_ARITY = {
    "two_mode_pure": ("gamma",),
    "two_mode_standard": ("a", "b", "c", "d"),
    "tritter": ("gamma",),
    "explicit": ("cm", "mean"),
    "random": ("n", "seed", "pure"),
}


@dataclass(frozen=True)
class Source:
    """Declarative source: a constructor name and its keyword parameters."""

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _SOURCE_ARITY:
            raise InvalidArgumentError(f"unknown source kind {self.kind!r}")
        extra = set(self.params) - set(_SOURCE_ARITY[self.kind])
        if extra:
            raise InvalidArgumentError(f"source {self.kind!r} got unexpected parameters {sorted(extra)}")

    def build(self):
        p = self.params
        if self.kind == "two_mode_pure":
            return two_mode_pure(p["gamma"])
        if self.kind == "two_mode_standard":
            return two_mode_standard(p["a"], p["b"], p["c"], p["d"])
        if self.kind == "tritter":
            return tritter_state(p["gamma"])
        if self.kind == "explicit":
            return GaussianState(np.asarray(p["cm"], dtype=float), p.get("mean"))
        return random_state(int(p["n"]), int(p["seed"]), pure=bool(p.get("pure", False)))


@dataclass(frozen=True)
class Squeezer:
    xi: float


@dataclass(frozen=True)
class Designed:
    """Operation chosen at run time from the standardized boundary mixedness."""

    kind: str = "I"
    rule: str = "table"
    margin: float = DEFAULT_MARGIN


@dataclass(frozen=True)
class Standardized:
    """Fixed canonical matrix applied after both boundary modes are standardized.

    ``params`` are not domain-checked, so parameter sweeps may cross type
    boundaries.
    """

    kind: str
    params: tuple = ()


@dataclass(frozen=True)
class Operation:
    """Two-mode unitary on ``modes = (i, j)`` (0-based global indices).

    ``unitary`` is a :class:`CanonicalForm`, a :class:`Squeezer`, a
    :class:`Designed` placeholder, a :class:`Standardized` canonical matrix
    or an explicit 4x4 array.
    """

    modes: tuple
    unitary: object

    def __post_init__(self):
        i, j = (int(m) for m in self.modes)
        if i == j:
            raise InvalidArgumentError(f"operation needs two distinct modes, got ({i}, {j})")
        object.__setattr__(self, "modes", (i, j))


@dataclass(frozen=True)
class NetworkSpec:
    sources: tuple
    operations: tuple = ()
    node_assignment: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "operations", tuple(self.operations))
        if not self.sources:
            raise InvalidArgumentError("network needs at least one source")

    def source_states(self):
        return [s.build() for s in self.sources]

    def source_of_mode(self, states=None):
        states = self.source_states() if states is None else states
        return [k for k, s in enumerate(states) for _ in range(s.n)]

    def with_operations(self, operations):
        return NetworkSpec(self.sources, tuple(operations), dict(self.node_assignment))


# -- two-mode unitaries -----------------------------------------------------


def two_mode_squeezer(xi):
    """Two-mode squeezer: blocks ``cosh(xi) I`` and ``sinh(xi) diag(1, -1)``.

    Equal to the type I canonical matrix with ``lambda = sinh(xi)``.
    """
    c, s = np.cosh(xi), np.sinh(xi)
    return np.block([[c * np.eye(2), s * _C], [s * _C, c * np.eye(2)]])


def _resolve(unitary):
    if isinstance(unitary, CanonicalForm):
        return canonical_array(unitary.kind, *unitary.params)
    if isinstance(unitary, Squeezer):
        return two_mode_squeezer(unitary.xi)
    S = np.asarray(unitary, dtype=float)
    if S.shape != (4, 4):
        raise InvalidArgumentError(f"explicit two-mode unitary must be 4x4, got {S.shape}")
    return S


# -- thresholds ---------------------------------------------------------------


def _check_gammas(g1, g2):
    if g1 < 1 - 1e-12 or g2 < 1 - 1e-12:
        raise InvalidArgumentError(f"boundary mixedness must be >= 1, got ({g1}, {g2})")


def table_threshold(kind, g1, g2):
    """Minimal ``lambda^2`` from the threshold table (types I-III), as tabulated.

    ``g1`` is the outgoing mode's mixedness, ``g2`` the incoming one's.
    """
    _check_gammas(g1, g2)
    s2 = (g1 + g2) ** 2
    if kind == "I":
        return (-s2 + np.sqrt(s2 * s2 + 4 * s2 * g1 * g2 * (g1 - 1))) / (2 * s2)
    if kind == "II":
        return (s2 + np.sqrt(s2 * s2 + 4 * s2 * g1 * g2 * (g1 - 1))) / (2 * s2)
    if kind == "III":
        q = g1 * g1 + g2 * g2
        return (-s2 + np.sqrt(q * q + 4 * g1 * g2 * (g1 * g1 - 1))) / (2 * g1 * g2)
    raise InvalidArgumentError(f"no lambda threshold for type {kind!r}")


def condition_threshold(kind, g1, g2):
    """Minimal ``lambda^2`` at which :func:`check_sufficiency` becomes an equality.

    For type IV this is the common ``lambda1^2 = lambda2^2`` on the boundary.
    """
    _check_gammas(g1, g2)
    if kind in ("I", "II"):
        return table_threshold(kind, g1, g2)
    if kind in ("III", "IV"):
        q = g1 * g1 + g2 * g2
        return (-q + np.sqrt(q * q + 4 * g1 * g1 * g2 * g2 * (g1 * g1 - 1))) / (2 * g1 * g2)
    raise InvalidArgumentError(f"no lambda threshold for type {kind!r}")


def attain_threshold(g1, g2):
    """Type I ``lambda^2`` that makes the merging cut as correlated as the boundary modes."""
    _check_gammas(g1, g2)
    return (max(g1, g2) - 1.0) / (g1 * g2 + 1.0)


def type_iv_condition(lam1, lam2, g1, g2):
    """Tabulated type IV inequality; returns ``(holds, lhs, rhs)``."""
    lhs = (g1 * lam1 * lam1 + g2) * (g2 * lam2 * lam2 + g1)
    rhs = g1**3 * g2
    return lhs >= rhs, lhs, rhs


@dataclass(frozen=True)
class Design:
    kind: str
    threshold: float
    form: CanonicalForm
    rule: str

    def to_dict(self):
        return {"type": self.kind, "threshold": self.threshold, "rule": self.rule, "form": self.form.to_dict()}


def design_optimal(kind, g1, g2, margin=DEFAULT_MARGIN, rule="table"):
    """Design a two-mode operation for standardized boundary mixedness ``g1``, ``g2``.

    Types I-III get ``lambda^2 = threshold * (1 + margin)`` (``margin`` itself
    when the threshold vanishes). Type IV returns the boundary point with
    ``lambda2 = -lambda1``, scaled by ``1 + margin``.
    """
    if rule not in RULES:
        raise InvalidArgumentError(f"unknown design rule {rule!r}; choose from {RULES}")
    if kind in ("V", "VI"):
        raise InvalidArgumentError(f"type {kind} has no design rule; only I-IV are tabulated")
    if kind not in ("I", "II", "III", "IV"):
        raise InvalidArgumentError(f"unknown canonical type {kind!r}")
    if rule == "attain" and kind != "I":
        raise InvalidArgumentError("the 'attain' rule designs type I operations only")
    if kind == "IV":
        thr = condition_threshold("IV", g1, g2)
        mu = np.sqrt(max(thr, 0.0)) * (1 + margin)
        return Design("IV", float(thr), CanonicalForm("IV", (mu, -mu)), rule)
    if rule == "attain":
        thr = attain_threshold(g1, g2)
    elif rule == "table":
        thr = table_threshold(kind, g1, g2)
    else:
        thr = condition_threshold(kind, g1, g2)
    lam2 = thr * (1 + margin) if thr > 0 else margin
    if kind == "III" and thr <= 0:
        lam2 = 0.0
    return Design(kind, float(thr), CanonicalForm(kind, (float(np.sqrt(lam2)),)), rule)


@dataclass(frozen=True)
class Sufficiency:
    holds: bool
    lhs: float
    rhs: float

    @property
    def relative_gap(self):
        return abs(self.lhs - self.rhs) / abs(self.lhs)


def check_sufficiency(S, g1, g2, rtol=SUFFICIENCY_RTOL):
    r"""Determinant inequality for a two-mode operation between standardized modes.

    ``lhs = g1^4 g2^2`` and
    ``rhs = det(g1 S11 S11^T + g2 S12 S12^T) det(g1 S21 S21^T + g2 S22 S22^T)``,
    the diagonal-block determinants of ``S (g1 I (+) g2 I) S^T``. The check
    holds when ``rhs >= lhs (1 - rtol)`` so exact equality survives rounding.
    """
    S = np.asarray(S, dtype=float)
    S11, S12, S21, S22 = S[:2, :2], S[:2, 2:], S[2:, :2], S[2:, 2:]
    lhs = g1**4 * g2**2
    rhs = np.linalg.det(g1 * S11 @ S11.T + g2 * S12 @ S12.T) * np.linalg.det(
        g1 * S21 @ S21.T + g2 * S22 @ S22.T
    )
    return Sufficiency(bool(rhs >= lhs * (1 - rtol)), float(lhs), float(rhs))


def tritter_squeezer_cosh2_bound(gamma):
    """Closed-form ``cosh^2 xi`` lower bound for squeezers joining tritter states.

    Kept for comparison; it is at most 1 for moderate squeezing and
    therefore not a usable design rule.
    """
    return (np.sqrt(5 + 4 * np.cosh(4 * gamma)) - 3) / 6


# -- protocol ---------------------------------------------------------------


def build_initial_state(spec):
    return tensor(*spec.source_states())


def standardize_boundary(state, mode):
    """Make the single-mode block of ``mode`` isotropic by a local unitary.

    Returns ``(new_state, unitary)``; the block becomes ``g I`` with
    ``g = sqrt(det block)``.
    """
    S1, _ = williamson_single_mode(state.block(mode))
    S = np.eye(2 * state.n)
    S[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2] = S1
    u = GaussianUnitary(S)
    return apply_unitary(state, u), u


def _boundary_gamma(state, mode):
    return float(np.sqrt(np.linalg.det(state.block(mode))))


@dataclass(frozen=True)
class OperationRecord:
    modes: tuple
    gamma1: float
    gamma2: float
    S: np.ndarray
    sufficiency: Sufficiency
    in_scope: bool
    design: Design = None

    def to_dict(self):
        out = {
            "modes": [m + 1 for m in self.modes],
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "eq9_ok": self.sufficiency.holds,
            "eq9_lhs": self.sufficiency.lhs,
            "eq9_rhs": self.sufficiency.rhs,
            "in_scope": self.in_scope,
        }
        if self.design is not None:
            out["design"] = self.design.to_dict()
        return out


class _Components:
    def __init__(self, labels):
        self.parent = {k: k for k in set(labels)}

    def find(self, k):
        while self.parent[k] != k:
            self.parent[k] = self.parent[self.parent[k]]
            k = self.parent[k]
        return k

    def union(self, a, b):
        self.parent[self.find(a)] = self.find(b)


def run_protocol(state, spec, tol=DEFAULT_TOL):
    """Apply the operations of ``spec`` in order and record each step.

    :class:`Designed` and :class:`Standardized` operations first standardize
    both boundary modes; the other encodings are applied as given, and their sufficiency check uses
    the operation expressed in the standardized frame.
    Returns ``(final_state, records)``.
    """
    owner = spec.source_of_mode()
    if len(owner) != state.n:
        raise InvalidArgumentError(f"spec declares {len(owner)} modes but state has {state.n}")
    comps = _Components(owner)
    records = []
    for op in spec.operations:
        i, j = op.modes
        for m in (i, j):
            if not 0 <= m < state.n:
                raise InvalidArgumentError(f"operation mode {m} out of range for {state.n} modes")
        in_scope = comps.find(owner[i]) != comps.find(owner[j])
        if not in_scope:
            log.warning("operation on modes %s joins already correlated modes", op.modes)
        design = None
        if isinstance(op.unitary, (Designed, Standardized)):
            state, _ = standardize_boundary(state, i)
            state, _ = standardize_boundary(state, j)
            g1, g2 = _boundary_gamma(state, i), _boundary_gamma(state, j)
            if isinstance(op.unitary, Designed):
                design = design_optimal(op.unitary.kind, g1, g2, op.unitary.margin, op.unitary.rule)
                S4 = canonical_array(design.form.kind, *design.form.params)
            else:
                S4 = canonical_array(op.unitary.kind, *op.unitary.params)
            S_frame = S4
        else:
            S4 = _resolve(op.unitary)
            W1, g1 = williamson_single_mode(state.block(i))
            W2, g2 = williamson_single_mode(state.block(j))
            W = np.zeros((4, 4))
            W[:2, :2], W[2:, 2:] = W1, W2
            S_frame = S4 @ np.linalg.inv(W)
        S = embed_two_mode(S4, (i, j), state.n)
        state = apply_unitary(state, GaussianUnitary(S))
        records.append(OperationRecord((i, j), g1, g2, S4, check_sufficiency(S_frame, g1, g2), in_scope, design))
        comps.union(owner[i], owner[j])
    return state, records


def apply_protocol(state, spec):
    return run_protocol(state, spec)[0]


@dataclass(frozen=True)
class NetworkReport:
    resultant_ggqc: float
    source_ggqc: tuple
    bound: float
    gap: float
    operations: tuple
    det_gamma: float

    @property
    def eq9_ok(self):
        return [r.sufficiency.holds for r in self.operations]

    def to_dict(self):
        return {
            "resultant_ggqc": self.resultant_ggqc,
            "source_ggqc": list(self.source_ggqc),
            "bound": self.bound,
            "gap": self.gap,
            "eq9_ok": self.eq9_ok,
            "det_gamma": self.det_gamma,
            "operations": [r.to_dict() for r in self.operations],
        }


def verify_network(spec, max_modes=DEFAULT_MAX_MODES):
    """Run the protocol and compare its GGQC with the smallest source GGQC.

    Single-mode sources carry no GGQC and are left out of the bound.
    """
    states = spec.source_states()
    source_values = tuple(ggqc(s, max_modes).value for s in states if s.n >= 2)
    if not source_values:
        raise InvalidArgumentError("no source with two or more modes; the bound is undefined")
    final, records = run_protocol(tensor(*states), spec)
    rep = ggqc(final, max_modes)
    bound = min(source_values)
    return NetworkReport(rep.value, source_values, bound, bound - rep.value, tuple(records), rep.det_gamma)


# -- reference networks -----------------------------------------------------


def chain_example(gamma, unitary=None):
    """Three tritter sources in a chain; operations on modes (2, 3) and (5, 6).

    ``unitary`` defaults to ``Designed("I")``.
    """
    u = Designed("I") if unitary is None else unitary
    return NetworkSpec([Source("tritter", {"gamma": gamma})] * 3, [Operation((2, 3), u), Operation((5, 6), u)])


def star_example(gamma, unitary=None):
    """Three tritter sources around a central mode: operations on (2, 3) then (2, 6)."""
    u = Designed("I") if unitary is None else unitary
    return NetworkSpec([Source("tritter", {"gamma": gamma})] * 3, [Operation((2, 3), u), Operation((2, 6), u)])
