"""Decision procedure for normalized sentences over the subspace model.

A basic sentence  exists x . /\\ [x:p_i] & /\\ ~[x:q_j]  is true exactly
when the meet of the positives is contained in no negative: a finite
union of strict subspaces can never cover a complex subspace, so a
witness ray avoiding every negative exists precisely then.  Boolean
combinations are decided leafwise; every verdict carries a full trace
and, where the shape admits one, a concrete witness ray that re-checks
against the literals it came from.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .axioms import (
    AxiomResult,
    ExactSemantics,
    RayElements,
    SubspaceElements,
    run_axiom_suite,
)
from .normalize import BAnd, BNot, BOr, BasicSentence, BoolCombo, Leaf
from .subspace import (
    DEFAULT_TOL,
    InternalInvariantError,
    Subspace,
    Tolerance,
    bottom,
    leq,
    meet,
    ray_in_avoiding,
    subspace_to_json,
    top,
)

__all__ = [
    "LeafVerdict",
    "Verdict",
    "decide_basic",
    "evaluate",
    "VdCrossCheck",
    "cross_check_vd",
    "AxiomSuiteReport",
    "check_axiom_suite",
    "verdict_to_json",
]


@dataclass(frozen=True)
class LeafVerdict:
    basic: BasicSentence
    truth: bool
    meet_all: Subspace  # meet of the positive subspaces
    contained: tuple[bool, ...]  # per negative: meet_all <= q_j
    witness: Subspace | None


@dataclass(frozen=True)
class Verdict:
    truth: bool
    witness: Subspace | None
    leaves: tuple[LeafVerdict, ...]


def _decide_leaf(basic: BasicSentence, dim: int, tol: Tolerance, seed: int) -> LeafVerdict:
    p_inf = top(dim)
    for p in basic.positives:
        p_inf = meet(p_inf, p, tol)
    contained = tuple(leq(p_inf, q, tol) for q in basic.negatives)
    truth = not any(contained)
    witness: Subspace | None = None
    if truth:
        if not basic.negatives:
            # The zero space satisfies every positive literal and there is
            # nothing to avoid.
            witness = bottom(dim)
        else:
            witness = ray_in_avoiding(p_inf, list(basic.negatives), tol, seed)
            if witness is None:
                raise InternalInvariantError("witness search failed after containment check")
    return LeafVerdict(basic, truth, p_inf, contained, witness)


def decide_basic(
    basic: BasicSentence, dim: int, tol: Tolerance = DEFAULT_TOL, seed: int = 0
) -> Verdict:
    leaf = _decide_leaf(basic, dim, tol, seed)
    return Verdict(leaf.truth, leaf.witness, (leaf,))


def evaluate(
    combo: BoolCombo, dim: int, tol: Tolerance = DEFAULT_TOL, seed: int = 0
) -> Verdict:
    """Decide a Boolean combination of basic sentences.

    All leaves are evaluated (no short-circuiting) so the trace is
    complete and deterministic.  A top-level witness is propagated when
    the truth of the combination rests on a single true leaf: from the
    leaf itself or from the first true branch of a disjunction.
    """
    leaves: list[LeafVerdict] = []

    def go(c: BoolCombo) -> tuple[bool, Subspace | None]:
        if isinstance(c, Leaf):
            v = _decide_leaf(c.basic, dim, tol, seed)
            leaves.append(v)
            return v.truth, v.witness
        if isinstance(c, BNot):
            t, _ = go(c.arg)
            return not t, None
        if isinstance(c, BAnd):
            lt, _ = go(c.left)
            rt, _ = go(c.right)
            return lt and rt, None
        if isinstance(c, BOr):
            lt, lw = go(c.left)
            rt, rw = go(c.right)
            return lt or rt, lw if lt else (rw if rt else None)
        raise ValueError(f"unknown combo node {c!r}")

    truth, witness = go(combo)
    return Verdict(truth, witness, tuple(leaves))


def verdict_to_json(v: Verdict) -> dict:
    return {
        "truth": v.truth,
        "witness": subspace_to_json(v.witness) if v.witness is not None else None,
        "leaves": [
            {
                "truth": leaf.truth,
                "meet_of_positives": subspace_to_json(leaf.meet_all),
                "negative_contains_meet": list(leaf.contained),
                "witness": subspace_to_json(leaf.witness) if leaf.witness is not None else None,
            }
            for leaf in v.leaves
        ],
    }


# ---------------------------------------------------------------------------
# Monte-Carlo cross-check over rays


@dataclass(frozen=True)
class VdCrossCheck:
    decider_truth: bool
    sampler_found: bool
    witness_ok: bool | None
    samples: int

    @property
    def agreement(self) -> bool:
        found_implies_true = (not self.sampler_found) or self.decider_truth
        witness_fine = self.witness_ok is not False
        return found_implies_true and witness_fine


def _satisfies_mask(vectors: np.ndarray, basic: BasicSentence, eq_tol: float) -> np.ndarray:
    """Pointwise satisfaction of the literal conjunction by unit columns."""
    ok = np.ones(vectors.shape[1], dtype=bool)
    for p in basic.positives:
        if p.rank == 0:
            resid = vectors
        else:
            resid = vectors - p.basis @ (p.basis.conj().T @ vectors)
        ok &= np.linalg.norm(resid, axis=0) < eq_tol
    for q in basic.negatives:
        if q.rank == 0:
            resid = vectors
        else:
            resid = vectors - q.basis @ (q.basis.conj().T @ vectors)
        ok &= ~(np.linalg.norm(resid, axis=0) < eq_tol)
    return ok


def cross_check_vd(
    basic: BasicSentence,
    dim: int,
    samples: int = 10_000,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOL,
) -> VdCrossCheck:
    """One-sided Monte-Carlo oracle over random rays (and the zero space).

    A sampled satisfier forces the decider to say true, and a decider
    witness must itself satisfy the literal conjunction.  The converse
    direction (no satisfier sampled) proves nothing and is not asserted.
    """
    verdict = decide_basic(basic, dim, tol, seed)
    rng = np.random.default_rng(seed)

    def draw(basis: np.ndarray | None, count: int) -> np.ndarray:
        k = dim if basis is None else basis.shape[1]
        coeffs = rng.standard_normal((k, count)) + 1j * rng.standard_normal((k, count))
        raw = coeffs if basis is None else basis @ coeffs
        return raw / np.linalg.norm(raw, axis=0, keepdims=True)

    # uniform rays alone would almost never land inside a positive, so
    # part of the budget proposes from the positives and their meet;
    # every candidate still has to pass the pointwise literal check
    streams = [None]
    streams.extend(p.basis for p in basic.positives if p.rank > 0)
    p_inf = top(dim)
    for p in basic.positives:
        p_inf = meet(p_inf, p, tol)
    if p_inf.rank > 0 and p_inf.rank < dim:
        streams.append(p_inf.basis)
    share = max(1, samples // len(streams))
    vecs = np.concatenate(
        [draw(b, share) for b in streams] + [draw(None, max(0, samples - share * len(streams)))],
        axis=1,
    )[:, :samples]
    found = bool(_satisfies_mask(vecs, basic, tol.eq_tol).any())
    # the zero space satisfies exactly when there are no negatives
    if not basic.negatives:
        found = True
    witness_ok: bool | None = None
    if verdict.truth and verdict.witness is not None:
        w = verdict.witness
        if w.rank == 0:
            witness_ok = not basic.negatives
        else:
            witness_ok = bool(_satisfies_mask(w.basis, basic, tol.eq_tol).all())
    return VdCrossCheck(verdict.truth, found, witness_ok, samples)


# ---------------------------------------------------------------------------
# Axiom suite over both element domains


@dataclass(frozen=True)
class AxiomSuiteReport:
    dim: int
    samples: int
    seed: int
    by_domain: dict[str, list[AxiomResult]]

    @property
    def total_violations(self) -> int:
        return sum(
            r.violations
            for results in self.by_domain.values()
            for r in results
            if not r.informational
        )

    @property
    def ok(self) -> bool:
        return self.total_violations == 0

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "samples": self.samples,
            "seed": self.seed,
            "domains": {
                label: [r.to_json() for r in results]
                for label, results in self.by_domain.items()
            },
            "total_violations": self.total_violations,
            "ok": self.ok,
        }


def check_axiom_suite(
    dim: int,
    samples: int = 500,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOL,
    figure: str = "all",
) -> AxiomSuiteReport:
    """Randomized check of every axiom against the subspace model and the
    ray model, under exact containment semantics."""
    sem = ExactSemantics(tol)
    by_domain = {
        domain.label: run_axiom_suite(dim, samples, seed, domain, sem, figure, tol)
        for domain in (SubspaceElements(), RayElements())
    }
    return AxiomSuiteReport(dim, samples, seed, by_domain)
