"""Test setups and the exhaustive refutability / verifiability deciders.

A setup is a finite observation domain plus an order-preserving map
``alpha`` from systems to sets of observations, stored as a boolean
matrix ``alpha[system, observation]``.  Column ``t`` of that matrix is
the set of systems that could have produced ``t``.

When several observations qualify as a witness, the one with the
lexicographically least identifier is reported.
"""
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import kernels
from .errors import ModelMismatch, ModelTooLarge, NotOrderPreserving, UnknownObservation, ValidationError
from .order import Requirement, check_model

__all__ = [
    "TestSetup",
    "RefutabilityReport",
    "build_setup",
    "setup_from_matrix",
    "reflexive_setup",
    "alpha_hat",
    "induced_obligations",
    "is_refutable",
    "is_verifiable",
    "is_more_permissive",
    "separating_requirement",
    "witness_report",
]

PERMISSIVE_ENUMERATION_CAP = 12


class TestSetup:
    __test__ = False  # keep pytest from collecting this class

    def __init__(self, name, model, observations, alpha):
        self.name = name
        self.model = model
        self.observations = tuple(observations)
        self._obs_index = {t: i for i, t in enumerate(self.observations)}
        if len(self._obs_index) != len(self.observations):
            raise ValidationError(f"setup {name!r} has duplicate observation identifiers")
        alpha = np.ascontiguousarray(alpha, dtype=np.bool_)
        if alpha.shape != (model.size, len(self.observations)):
            raise ValidationError(
                f"alpha matrix has shape {alpha.shape}, expected {(model.size, len(self.observations))}"
            )
        alpha.setflags(write=False)
        self.alpha = alpha
        self.lex_order = np.array(
            sorted(range(len(self.observations)), key=self.observations.__getitem__), dtype=np.int64
        )

    def __repr__(self):
        return f"<TestSetup {self.name!r}: {len(self.observations)} observations>"

    def obs_index(self, t):
        try:
            return self._obs_index[t]
        except KeyError:
            raise UnknownObservation(t) from None

    def alpha_of(self, e):
        """Observations system ``e`` can yield, sorted."""
        row = self.alpha[self.model.index(e)]
        return sorted(self.observations[i] for i in np.flatnonzero(row))

    def observable(self):
        """Mask of observations some system can yield."""
        return self.alpha.any(axis=0)


@dataclass(frozen=True)
class RefutabilityReport:
    """Outcome of an exhaustive decider.

    ``witnesses`` maps each system in the checked population to the
    observation that settles it; ``blockers`` lists the systems for which
    no observation does.  ``holds`` iff there are no blockers.
    """

    holds: bool
    witnesses: dict = field(repr=False)
    blockers: tuple
    kind: str = "refutable"
    setup: str = ""
    requirement: str = ""

    @property
    def verdict(self):
        return "holds" if self.holds else "fails"


def _check_monotone(model, alpha, observations):
    if model.is_powerset:
        i, j, t = kernels.monotone_violation_pow(alpha, model.nbits)
    else:
        i, j, t = kernels.monotone_violation_rel(model.leq_matrix, alpha)
    if i >= 0:
        raise NotOrderPreserving(model.elements[i], model.elements[j], observations[t])


def setup_from_matrix(model, observations, alpha, name="custom", validate=True):
    setup = TestSetup(name, model, observations, alpha)
    if validate:
        _check_monotone(model, setup.alpha, setup.observations)
    return setup


def build_setup(model, observations, alpha, name="custom"):
    """Validate and build a setup from a mapping ``element -> observations``.

    ``alpha`` must be defined on every element.  Raises
    :class:`NotOrderPreserving` with a concrete offending pair.
    """
    observations = list(dict.fromkeys(observations))
    setup_obs = {t: i for i, t in enumerate(observations)}
    mat = np.zeros((model.size, len(observations)), dtype=np.bool_)
    seen = set()
    for e, obs in alpha.items():
        i = model.index(e)
        seen.add(i)
        for t in obs:
            if t not in setup_obs:
                raise UnknownObservation(t)
            mat[i, setup_obs[t]] = True
    if len(seen) != model.size:
        missing = sorted(set(model.elements) - {model.elements[i] for i in seen})
        raise ValidationError(f"alpha is undefined on {missing[:5]}")
    return setup_from_matrix(model, observations, mat, name)


def reflexive_setup(model):
    """Observations are systems; a system yields each of its refinements."""
    try:
        leq = model.leq_matrix
    except MemoryError as exc:
        raise ModelTooLarge(str(exc)) from None
    return TestSetup("reflexive", model, model.elements, leq.T)


def alpha_hat(setup, t):
    """Systems that could have yielded observation ``t``."""
    col = setup.alpha[:, setup.obs_index(t)]
    return Requirement(setup.model, col, f"alpha_hat({t})")


def induced_obligations(setup):
    """Distinct sets ``alpha_hat(t)``, in lexicographic order of ``t``."""
    seen = set()
    out = []
    for t in setup.lex_order:
        col = setup.alpha[:, t]
        key = col.tobytes()
        if key in seen:
            continue
        seen.add(key)
        out.append(Requirement(setup.model, col, f"alpha_hat({setup.observations[t]})"))
    return out


def witness_report(setup, good, rows, kind, req_name=""):
    """Report, for every system in ``rows``, the least observation
    ``t in alpha(S)`` with ``good[t]``."""
    w = kernels.first_witness(setup.alpha, good, rows, setup.lex_order)
    model = setup.model
    witnesses = {}
    blockers = []
    for s in np.flatnonzero(rows):
        if w[s] >= 0:
            witnesses[model.elements[s]] = setup.observations[w[s]]
        else:
            blockers.append(model.elements[s])
    return RefutabilityReport(
        holds=not blockers,
        witnesses=witnesses,
        blockers=tuple(sorted(blockers)),
        kind=kind,
        setup=setup.name,
        requirement=req_name,
    )


def is_refutable(setup, R):
    """Every violator of ``R`` has an observation no satisfier can yield."""
    check_model(setup.model, R)
    omega = kernels.irremediable(setup.alpha, R.mask)
    return witness_report(setup, omega, ~R.mask, "refutable", R.name)


def is_verifiable(setup, R):
    """Every satisfier of ``R`` has an observation only satisfiers can yield."""
    check_model(setup.model, R)
    good = kernels.contained(setup.alpha, R.mask)
    return witness_report(setup, good, R.mask.copy(), "verifiable", R.name)


def _uncovered_column(setup1, setup2):
    # column t2 of setup2 whose alpha_hat is not a union of setup1's alpha_hats
    a1 = setup1.alpha.astype(np.int32)
    a2 = setup2.alpha
    inside = (a1.T @ (~a2).astype(np.int32)) == 0
    union = (a1 @ inside.astype(np.int32)) > 0
    bad = np.flatnonzero((union != a2).any(axis=0))
    if bad.size == 0:
        return None
    return min(bad, key=lambda t: setup2.observations[t])


def _refutable_family(setup, n):
    out = set()
    for bits in product((False, True), repeat=n):
        mask = np.array(bits, dtype=np.bool_)
        omega = kernels.irremediable(setup.alpha, mask)
        w = kernels.first_witness(setup.alpha, omega, ~mask, setup.lex_order)
        if not (w == -1).any():
            out.add(bits)
    return out


def is_more_permissive(setup1, setup2, model=None, method="cover", cap=PERMISSIVE_ENUMERATION_CAP):
    """Is every ``setup2``-refutable requirement also ``setup1``-refutable?

    ``method="cover"`` decides this exactly for any model size: the
    complements of the T-refutable requirements are precisely the unions
    of sets ``alpha_hat(t)``, so the relation holds iff each of
    ``setup2``'s ``alpha_hat`` sets is a union of ``setup1``'s.
    ``method="enumerate"`` checks all ``2**n`` requirements and refuses
    models with more than ``cap`` elements.
    """
    model = model if model is not None else setup1.model
    if not (setup1.model == model and setup2.model == model):
        raise ModelMismatch("setups are over different models")
    if method == "cover":
        return _uncovered_column(setup1, setup2) is None
    if method == "enumerate":
        if model.size > cap:
            raise ModelTooLarge(f"{model.size} elements exceeds the enumeration cap of {cap}")
        return _refutable_family(setup2, model.size) <= _refutable_family(setup1, model.size)
    raise ValueError(f"unknown method {method!r}")


def separating_requirement(setup1, setup2):
    """A requirement refutable in ``setup2`` but not in ``setup1``, or None."""
    t = _uncovered_column(setup1, setup2)
    if t is None:
        return None
    col = setup2.alpha[:, t]
    return Requirement(setup1.model, ~col, f"not alpha_hat({setup2.observations[t]})")
