"""Randomized validity checking for the verification-statement axioms.

Each axiom is an implication (or an existential) quantified over system
elements x and subspace parameters.  Instances are generated with the
antecedent deliberately biased towards truth, since for random data most
antecedents are vacuously false.  Evaluation is parameterized twice:

* the *element domain* decides what x ranges over: arbitrary subspaces,
  or only rays and the zero space;
* the *semantics* decides how a verification statement [s : p] is
  evaluated: exact containment, or the projective definition sampled
  over rays of the complement (every ray of p-orthogonal must project s
  to the zero space).

The sampled semantics exercises the same statements using nothing but
projection impossibility, mirroring how the axioms fall out of the
circuit rules.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import subspace as sub
from .sampling import (
    random_compatible_pair,
    random_ray_or_bot,
    random_ray_within,
    random_subspace,
    random_subspace_within,
    random_unitary,
)
from .subspace import DEFAULT_TOL, Subspace, Tolerance, UnitaryOp

__all__ = [
    "AxiomResult",
    "ExactSemantics",
    "SampledSemantics",
    "SubspaceElements",
    "RayElements",
    "AXIOMS",
    "axiom_names",
    "run_axiom_suite",
]


# ---------------------------------------------------------------------------
# Element domains


class SubspaceElements:
    """x ranges over arbitrary subspaces (the full lattice model)."""

    label = "subspaces"

    def free(self, rng: np.random.Generator, dim: int, tol: Tolerance) -> Subspace:
        return random_subspace(rng, dim, tol=tol)

    def inside(self, rng: np.random.Generator, s: Subspace, tol: Tolerance) -> Subspace:
        return random_subspace_within(rng, s, tol=tol)


class RayElements:
    """x ranges over rays and the zero space (the vector model)."""

    label = "rays"

    def free(self, rng: np.random.Generator, dim: int, tol: Tolerance) -> Subspace:
        return random_ray_or_bot(rng, dim, tol)

    def inside(self, rng: np.random.Generator, s: Subspace, tol: Tolerance) -> Subspace:
        if s.rank == 0 or rng.random() < 0.125:
            return sub.bottom(s.dim)
        return random_ray_within(rng, s, tol)


# ---------------------------------------------------------------------------
# Semantics


class ExactSemantics:
    """[s : p] is containment; projections and unitaries act directly."""

    label = "exact"

    def __init__(self, tol: Tolerance = DEFAULT_TOL):
        self.tol = tol

    def verify(self, s: Subspace, p: Subspace) -> bool:
        return sub.leq(s, p, self.tol)

    def project(self, s: Subspace, q: Subspace) -> Subspace:
        return sub.sasaki_and(s, q, self.tol)

    def transform(self, u: UnitaryOp, s: Subspace) -> Subspace:
        return sub.apply_unitary(u, s, self.tol)


class SampledSemantics:
    """[s : p] by its projective definition, sampled over rays.

    s verifies p when every ray of the complement of p projects s to the
    zero space.  The complement's rays are sampled (``rays_per_check``
    per evaluation); a genuinely true statement can never be refuted by
    sampling, so suites under this semantics are one-sided in the safe
    direction.
    """

    label = "sampled"

    def __init__(self, rng: np.random.Generator, rays_per_check: int = 64,
                 tol: Tolerance = DEFAULT_TOL):
        self.rng = rng
        self.rays = rays_per_check
        self.tol = tol

    def verify(self, s: Subspace, p: Subspace) -> bool:
        comp = sub.ortho(p, self.tol)
        if comp.rank == 0:
            return True
        if s.rank == 0:
            return True
        # Projecting s onto a ray phi gives the zero space exactly when
        # phi is orthogonal to s, i.e. the basis residual s* phi vanishes.
        coeffs = self.rng.standard_normal((comp.rank, self.rays)) + 1j * self.rng.standard_normal(
            (comp.rank, self.rays)
        )
        phis = comp.basis @ coeffs
        phis = phis / np.linalg.norm(phis, axis=0, keepdims=True)
        overlaps = np.linalg.norm(s.basis.conj().T @ phis, axis=0)
        return bool(np.all(overlaps < self.tol.eq_tol))

    def project(self, s: Subspace, q: Subspace) -> Subspace:
        return sub.sasaki_and(s, q, self.tol)

    def transform(self, u: UnitaryOp, s: Subspace) -> Subspace:
        return sub.apply_unitary(u, s, self.tol)


# ---------------------------------------------------------------------------
# Axiom definitions


@dataclass(frozen=True)
class AxiomDef:
    name: str
    in_base: bool
    in_revised: bool
    existential: bool
    instance: Callable  # (rng, dim, domain, sem, tol) -> (hypothesis, conclusion)


def _mix(rng, domain, dim, tol, inside_of: Subspace | None):
    """Half the time sample x inside the biasing subspace, else freely."""
    if inside_of is not None and rng.random() < 0.5:
        return domain.inside(rng, inside_of, tol)
    return domain.free(rng, dim, tol)


def _ax_verify_top(rng, dim, domain, sem, tol):
    x = domain.free(rng, dim, tol)
    return True, sem.verify(x, sub.top(dim))


def _ax_some_possible(rng, dim, domain, sem, tol):
    x = domain.free(rng, dim, tol)
    return True, not sem.verify(x, sub.bottom(dim))


def _ax_monotone(rng, dim, domain, sem, tol):
    p = random_subspace(rng, dim, tol=tol)
    q = sub.join(p, random_subspace(rng, dim, tol=tol), tol)
    x = _mix(rng, domain, dim, tol, p)
    return sem.verify(x, p), sem.verify(x, q)


def _ax_meet_compatible(rng, dim, domain, sem, tol):
    p, q = random_compatible_pair(rng, dim, tol)
    x = _mix(rng, domain, dim, tol, sub.meet(p, q, tol))
    hyp = sem.verify(x, p) and sem.verify(x, q)
    return hyp, sem.verify(x, sub.meet(p, q, tol))


def _ax_meet(rng, dim, domain, sem, tol):
    p = random_subspace(rng, dim, tol=tol)
    q = random_subspace(rng, dim, tol=tol)
    x = _mix(rng, domain, dim, tol, sub.meet(p, q, tol))
    hyp = sem.verify(x, p) and sem.verify(x, q)
    return hyp, sem.verify(x, sub.meet(p, q, tol))


def _ax_project_intro(rng, dim, domain, sem, tol):
    p = random_subspace(rng, dim, tol=tol)
    q = random_subspace(rng, dim, tol=tol)
    x = _mix(rng, domain, dim, tol, p)
    return sem.verify(x, p), sem.verify(sem.project(x, q), sub.sasaki_and(p, q, tol))


def _ax_project_chain(rng, dim, domain, sem, tol):
    q = random_subspace(rng, dim, tol=tol)
    p = random_subspace_within(rng, q, tol=tol)
    # Bias: x projecting into q inside the complement of p.  Seed a ray of
    # comp(p) ^ q, shift it by a ray of comp(q); the projection onto q of
    # the shifted ray lands back on the seed, which is p-orthogonal.
    seed_space = sub.meet(sub.ortho(p, tol), q, tol)
    if rng.random() < 0.5:
        x = domain.free(rng, dim, tol)
    elif seed_space.rank > 0:
        w = random_ray_within(rng, seed_space, tol)
        comp_q = sub.ortho(q, tol)
        vec = w.basis[:, 0].copy()
        if comp_q.rank > 0 and rng.random() < 0.5:
            z = random_ray_within(rng, comp_q, tol)
            vec = vec + z.basis[:, 0]
        x = sub.span_of([vec], dim, tol)
    else:
        x = domain.inside(rng, sub.ortho(q, tol), tol)
    hyp = sem.verify(sem.project(sem.project(x, q), p), sub.bottom(dim))
    concl = sem.verify(sem.project(x, p), sub.bottom(dim))
    return hyp, concl


def _ax_project_bottom(rng, dim, domain, sem, tol):
    q = random_subspace(rng, dim, tol=tol)
    x = _mix(rng, domain, dim, tol, sub.ortho(q, tol))
    hyp = sem.verify(sem.project(x, q), sub.bottom(dim))
    return hyp, sem.verify(x, sub.ortho(q, tol))


def _ax_project_adjoint(rng, dim, domain, sem, tol):
    p = random_subspace(rng, dim, tol=tol)
    q = random_subspace(rng, dim, tol=tol)
    x = _mix(rng, domain, dim, tol, sub.sasaki_hook(p, q, tol))
    hyp = sem.verify(sem.project(x, q), p)
    return hyp, sem.verify(x, sub.sasaki_hook(p, q, tol))


def _ax_unitary_intro(rng, dim, domain, sem, tol):
    u = random_unitary(rng, dim)
    p = random_subspace(rng, dim, tol=tol)
    x = _mix(rng, domain, dim, tol, p)
    return sem.verify(x, p), sem.verify(sem.transform(u, x), sub.apply_unitary(u, p, tol))


def _ax_unitary_elim(rng, dim, domain, sem, tol):
    u = random_unitary(rng, dim)
    p = random_subspace(rng, dim, tol=tol)
    back = sub.apply_unitary(u.adjoint(), p, tol)
    x = _mix(rng, domain, dim, tol, back)
    return sem.verify(sem.transform(u, x), p), sem.verify(x, back)


AXIOMS: tuple[AxiomDef, ...] = (
    AxiomDef("verify-top", True, True, False, _ax_verify_top),
    AxiomDef("some-possible", True, True, True, _ax_some_possible),
    AxiomDef("monotone", True, True, False, _ax_monotone),
    AxiomDef("meet-compatible", True, False, False, _ax_meet_compatible),
    AxiomDef("meet", False, True, False, _ax_meet),
    AxiomDef("project-intro", True, True, False, _ax_project_intro),
    AxiomDef("project-chain", True, False, False, _ax_project_chain),
    AxiomDef("project-bottom", True, False, False, _ax_project_bottom),
    AxiomDef("project-adjoint", False, True, False, _ax_project_adjoint),
    AxiomDef("unitary-intro", True, True, False, _ax_unitary_intro),
    AxiomDef("unitary-elim", True, True, False, _ax_unitary_elim),
)


def axiom_names(figure: str = "all") -> list[str]:
    if figure == "base":
        return [a.name for a in AXIOMS if a.in_base]
    if figure == "revised":
        return [a.name for a in AXIOMS if a.in_revised]
    return [a.name for a in AXIOMS]


@dataclass(frozen=True)
class AxiomResult:
    name: str
    figure: str  # "base" | "revised" | "both"
    existential: bool
    instances: int
    hypothesis_hits: int
    violations: int
    informational: bool = False

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "figure": self.figure,
            "existential": self.existential,
            "instances": self.instances,
            "hypothesis_hits": self.hypothesis_hits,
            "violations": self.violations,
            "informational": self.informational,
        }


def _figure_label(a: AxiomDef) -> str:
    if a.in_base and a.in_revised:
        return "both"
    return "base" if a.in_base else "revised"


def run_axiom_suite(
    dim: int,
    samples: int,
    seed: int,
    domain,
    semantics,
    figure: str = "all",
    tol: Tolerance = DEFAULT_TOL,
) -> list[AxiomResult]:
    """Evaluate every axiom on ``samples`` random instances.

    For a conditional axiom a violation is an instance whose antecedent
    holds and conclusion fails; for an existential the whole run must
    produce at least one witness.  The unconditioned meet axiom is
    marked informational below dimension 3: it is recorded there, never
    asserted.
    """
    selected = [
        a for a in AXIOMS
        if figure == "all" or (figure == "base" and a.in_base) or (figure == "revised" and a.in_revised)
    ]
    results = []
    for index, axiom in enumerate(selected):
        rng = np.random.default_rng([seed, dim, index])
        hits = 0
        violations = 0
        witnessed = False
        for _ in range(samples):
            hyp, concl = axiom.instance(rng, dim, domain, semantics, tol)
            if axiom.existential:
                if concl:
                    witnessed = True
                continue
            if hyp:
                hits += 1
                if not concl:
                    violations += 1
        if axiom.existential:
            hits = int(witnessed)
            violations = 0 if witnessed else 1
        results.append(
            AxiomResult(
                name=axiom.name,
                figure=_figure_label(axiom),
                existential=axiom.existential,
                instances=samples,
                hypothesis_hits=hits,
                violations=violations,
                informational=(axiom.name == "meet" and dim < 3),
            )
        )
    return results
