"""Refutability under assumptions, residual prohibitions, and the
refute-then-verify reduction.

An assumption is a set of systems taken as given without testing; it
has the same type as a requirement.  Conclusions drawn under an
assumption always name it.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .eio import builtin_requirement, build_universe, exhibits, never_exhibits, tk_setup
from .errors import ValidationError
from .order import Requirement, check_model, meet
from .testsetup import is_verifiable, witness_report

__all__ = [
    "AssumptionContext",
    "CampaignReport",
    "refutable_under",
    "residual_prohibition",
    "reduction_campaign",
    "SCENARIOS",
    "total_deterministic",
    "example12",
    "example14",
    "phone_scenario",
    "vending_scenarios",
    "mealy_scenario",
]


@dataclass(frozen=True)
class AssumptionContext:
    assumption: Requirement
    requirement: Requirement
    setup: object

    def __post_init__(self):
        check_model(self.setup.model, self.assumption, self.requirement)


def refutable_under(ctx):
    """Every system of the assumption violating the requirement has an
    observation that no system satisfying both could yield."""
    A, R, setup = ctx.assumption, ctx.requirement, ctx.setup
    good = kernels.irremediable(setup.alpha, A.mask & R.mask)
    return witness_report(setup, good, A.mask & ~R.mask, "refutable_under", R.name)


def residual_prohibition(model, R, A):
    """Refinements of systems satisfying both ``A`` and ``R``."""
    check_model(model, R, A)
    return Requirement(model, model.down(A.mask & R.mask), f"P[{R.name}|{A.name}]")


@dataclass(frozen=True)
class CampaignReport:
    system: str
    requirement: str
    assumption: str
    residual: Requirement
    refutation_witness: object  # observation refuting membership in the residual
    verification_witness: object  # observation verifying membership in the assumption
    assumption_status: str  # verified | not-verified | AssumptionNotVerifiable
    conclusion: str  # unconditional | conditional | inconclusive

    @property
    def summary(self):
        s, r, a = self.system, self.requirement, self.assumption
        if self.conclusion == "unconditional":
            return f"{s} violates {r} (assumption {a} verified by {self.verification_witness})"
        if self.conclusion == "conditional":
            return f"{s} violates {r} provided {s} satisfies the untested assumption {a}"
        return f"no conclusion about {s} and {r}"


def _least_witness(setup, good, s):
    row = np.zeros(setup.model.size, dtype=np.bool_)
    row[s] = True
    w = kernels.first_witness(setup.alpha, good, row, setup.lex_order)[s]
    return setup.observations[w] if w >= 0 else None


def reduction_campaign(model, setup, R, A, system):
    """Try to refute ``system in P[R|A]``, then try to verify ``system in A``.

    Only absence of witnesses is ever inferred as "inconclusive"; the
    campaign never concludes that a system satisfies ``R`` or ``A``.
    """
    check_model(model, R, A)
    check_model(setup.model, R)
    s = model.index(system)
    P = residual_prohibition(model, R, A)
    refute = _least_witness(setup, kernels.irremediable(setup.alpha, P.mask), s)
    verify = None
    if is_verifiable(setup, A).holds:
        verify = _least_witness(setup, kernels.contained(setup.alpha, A.mask), s)
        status = "verified" if verify is not None else "not-verified"
    else:
        status = "AssumptionNotVerifiable"
    if refute is None:
        conclusion = "inconclusive"
    elif verify is not None:
        conclusion = "unconditional"
    else:
        conclusion = "conditional"
    return CampaignReport(system, R.name, A.name, P, refute, verify, status, conclusion)


# Named scenarios over the bounded input-output model.


def total_deterministic(universe):
    return meet(
        builtin_requirement(universe, "totality"), builtin_requirement(universe, "determinism")
    ).renamed("total_deterministic")


def example12(bound=2):
    """Obligation "exhibits (1,0)" refuted in T_1 under totality and determinacy."""
    u = build_universe(bound)
    return u, AssumptionContext(total_deterministic(u), exhibits(u, (1, 0), "O"), tk_setup(u, 1))


def example13_prohibition(universe):
    """Forbid every output but 0 on input 1."""
    return never_exhibits(universe, [(1, o) for o in range(1, universe.bound)], "never(1,i+1)")


def example14(bound=4):
    """Returns ``(universe, R, A, system)``.

    R: a system exhibiting (1,0) may not output 0 on any other odd input;
    a system without (1,0) must output 0 on every input of the grid
    (the finite stand-in for "infinitely many inputs").
    A: exhibits (1,0).  The system under test is {(1,0),(3,0)}.
    """
    if bound < 4:
        raise ValidationError("the scenario needs input 3, so bound >= 4")
    u = build_universe(bound)
    g = u.grid
    has10 = g[:, 1, 0]
    odd_zero_elsewhere = g[:, 3::2, 0].any(axis=1)
    zero_everywhere = g[:, :, 0].all(axis=1)
    R = u.requirement(np.where(has10, ~odd_zero_elsewhere, zero_everywhere), "R14")
    A = exhibits(u, (1, 0), "A14")
    system = u.element([(1, 0), (3, 0)])
    return u, R, A, system


def phone_scenario(universe, client=0, phone=1):
    """Functional requirement "output ``phone`` on input ``client``"
    under totality and determinacy, in T_1."""
    R = exhibits(universe, (client, phone), f"lookup({client})={phone}")
    return AssumptionContext(total_deterministic(universe), R, tk_setup(universe, 1))


def vending_scenarios(universe, coin=0, good=0):
    """Coffee machine (assumed deterministic and total) versus slot
    machine (no assumption) with the same obligation."""
    R = exhibits(universe, (coin, good), "serves")
    t1 = tk_setup(universe, 1)
    coffee = AssumptionContext(total_deterministic(universe), R, t1)
    slot = AssumptionContext(universe.model.all("no_assumption"), R, t1)
    return coffee, slot


def mealy_scenario(universe, outputs):
    """Required output ``outputs[i]`` per input, read as obligation
    ``O`` and prohibition ``P``; returns ``(ctx, O, P)`` with ``ctx``
    over ``O & P`` under totality and determinacy."""
    O = universe.model.all("O")
    for i, o in outputs.items():
        O = meet(O, exhibits(universe, (i, o)))
    forbidden = [(i, q) for i, o in outputs.items() for q in range(universe.bound) if q != o]
    P = never_exhibits(universe, forbidden, "P")
    R = meet(O.renamed("O"), P).renamed("R")
    return AssumptionContext(total_deterministic(universe), R, tk_setup(universe, 1)), O.renamed("O"), P


SCENARIOS = {
    "example12": example12,
    "example14": example14,
}
