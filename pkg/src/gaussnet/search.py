"""Sampling oracle for the maximal GGQC a network can reach.

The search is deliberately plain: draw operation sets, run the protocol,
keep the best. It never refines locally, so its results stay independent of
the design rules it is used to check.
"""

from dataclasses import dataclass, field

import numpy as np

from .classify import KINDS, canonical_array
from .errors import BoundViolationError, InvalidArgumentError
from .measure import DEFAULT_MAX_MODES, ggqc
from .network import Designed, NetworkSpec, Operation, Standardized, apply_protocol, build_initial_state, run_protocol
from .symplectic import random_symplectic

BOUND_SLACK = 1e-9
SAMPLERS = ("random", "canonical", "mixed", "identity")


def _random_local(rng):
    """Random 2x2 unit-determinant block: rotation times positive diagonal scaling."""
    theta = rng.uniform(0, 2 * np.pi)
    k = np.exp(rng.uniform(-1, 1))
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]]) @ np.diag([k, 1 / k])


def _random_canonical(rng):
    kind = KINDS[rng.integers(len(KINDS))]
    if kind == "I":
        params = (rng.uniform(0.05, 2.0),)
    elif kind == "II":
        params = (rng.uniform(1.05, 2.5),)
    elif kind == "III":
        params = (rng.uniform(-2.0, 2.0),)
    elif kind == "IV":
        mu = rng.uniform(-2.0, 2.0)
        params = (mu, -mu)
    elif kind == "V":
        params = ()
    else:
        params = (rng.uniform(0.05, 0.95),)
    return canonical_array(kind, *params)


def sample_two_mode(rng, sampler):
    """One 4x4 symplectic drawn by ``sampler``."""
    if sampler == "identity":
        return np.eye(4)
    if sampler == "mixed":
        sampler = "random" if rng.random() < 0.5 else "canonical"
    if sampler == "random":
        return random_symplectic(2, int(rng.integers(2**32)))
    if sampler == "canonical":
        blocks = [_random_local(rng) for _ in range(4)]
        L = np.zeros((4, 4))
        R = np.zeros((4, 4))
        L[:2, :2], L[2:, 2:], R[:2, :2], R[2:, 2:] = blocks
        return L @ _random_canonical(rng) @ R
    raise InvalidArgumentError(f"unknown sampler {sampler!r}; choose from {SAMPLERS}")


@dataclass(frozen=True)
class SearchConfig:
    spec: NetworkSpec
    samples: int = 200
    seed: int = 0
    sampler: str = "mixed"
    designed: tuple = field(default=())

    def __post_init__(self):
        if self.samples < 1:
            raise InvalidArgumentError("samples must be >= 1")
        if self.sampler not in SAMPLERS:
            raise InvalidArgumentError(f"unknown sampler {self.sampler!r}; choose from {SAMPLERS}")


@dataclass(frozen=True)
class SearchResult:
    best_value: float
    best_ops: tuple
    bound: float
    trace: tuple
    values: tuple

    def to_dict(self):
        return {
            "best_value": self.best_value,
            "bound": self.bound,
            "gap": self.bound - self.best_value,
            "best_ops": [_op_to_json(S) for S in self.best_ops],
            "trace": [{"sample": k, "value": v} for k, v in self.trace],
        }


def _op_to_json(op):
    if isinstance(op, Designed):
        return {"design": op.kind, "rule": op.rule, "margin": op.margin}
    return {"rows": np.asarray(op).tolist()}


def _source_bound(spec, max_modes):
    return min(ggqc(s, max_modes).value for s in spec.source_states() if s.n >= 2)


def random_search_max_ggqc(cfg, max_modes=DEFAULT_MAX_MODES):
    """Largest resultant GGQC over sampled operation sets.

    Sample ``k`` draws from ``numpy.random.default_rng([seed, k])`` so results
    do not depend on evaluation order. Each entry of ``cfg.designed`` adds
    one more candidate in which every operation is that :class:`Designed`
    rule. Ties keep the earliest candidate.

    Raises:
        BoundViolationError: a candidate exceeds the smallest source GGQC
            by more than ``1e-9``.
    """
    spec = cfg.spec
    bound = _source_bound(spec, max_modes)
    initial = build_initial_state(spec)
    candidates = []
    for k in range(cfg.samples):
        rng = np.random.default_rng([cfg.seed, k])
        candidates.append(tuple(sample_two_mode(rng, cfg.sampler) for _ in spec.operations))
    for d in cfg.designed:
        candidates.append(tuple(d for _ in spec.operations))

    best, best_ops, trace, values = -np.inf, (), [], []
    for k, ops in enumerate(candidates):
        trial = spec.with_operations(Operation(op.modes, u) for op, u in zip(spec.operations, ops))
        value = ggqc(apply_protocol(initial, trial), max_modes).value
        if value > bound + BOUND_SLACK:
            raise BoundViolationError(f"candidate {k} reached {value!r}, above the source bound {bound!r}")
        values.append(value)
        if value > best:
            best, best_ops = value, ops
            trace.append((k, value))
    return SearchResult(float(best), best_ops, float(bound), tuple(trace), tuple(values))


@dataclass(frozen=True)
class SweepRow:
    lam: float
    ggqc: float
    eq9: bool
    gap: float


def sweep_lambda(spec, kind, grid, max_modes=DEFAULT_MAX_MODES):
    """Resultant GGQC with every operation set to the canonical ``kind`` at each ``lambda``.

    Operations act on standardized boundary modes. ``eq9`` records whether
    the determinant sufficiency check holds for every operation. Rows follow
    grid order.
    """
    grid = list(grid)
    if not grid:
        raise InvalidArgumentError("lambda grid must be nonempty")
    if kind not in ("I", "II", "III", "VI"):
        raise InvalidArgumentError(f"sweeps are defined for one-parameter types, got {kind!r}")
    bound = _source_bound(spec, max_modes)
    initial = build_initial_state(spec)
    rows = []
    for lam in grid:
        fixed = Standardized(kind, (float(lam),))
        trial = spec.with_operations(Operation(op.modes, fixed) for op in spec.operations)
        final, records = run_protocol(initial, trial)
        value = ggqc(final, max_modes).value
        rows.append(SweepRow(float(lam), float(value), all(r.sufficiency.holds for r in records), float(bound - value)))
    return rows
