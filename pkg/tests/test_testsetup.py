import numpy as np
import pytest

from testlimits import (
    alpha_hat,
    build_model,
    build_setup,
    classify,
    induced_obligations,
    is_more_permissive,
    is_refutable,
    is_verifiable,
    reflexive_setup,
    requirement,
    separating_requirement,
    up_closure,
)
from testlimits.eio import build_universe, builtin_requirement, tk_setup
from testlimits.errors import ModelMismatch, ModelTooLarge, NotOrderPreserving, UnknownObservation, ValidationError
from testlimits.testsetup import setup_from_matrix


@pytest.fixture
def two_obs(diamond):
    return build_setup(
        diamond, ["t1", "t2"], {"bot": [], "a": ["t1"], "b": ["t2"], "top": ["t1", "t2"]}, "two"
    )


class TestBuildSetup:
    def test_valid(self, two_obs):
        assert two_obs.alpha_of("top") == ["t1", "t2"]
        assert two_obs.alpha_of("bot") == []

    def test_not_order_preserving(self, diamond):
        with pytest.raises(NotOrderPreserving) as exc:
            build_setup(diamond, ["t1", "t2"], {"bot": [], "a": ["t1"], "b": ["t2"], "top": ["t1"]})
        assert exc.value.pair == ("b", "top")
        assert exc.value.missing == "t2"

    def test_alpha_must_be_total(self, diamond):
        with pytest.raises(ValidationError):
            build_setup(diamond, ["t1"], {"bot": [], "a": ["t1"]})

    def test_unknown_observation(self, diamond):
        with pytest.raises(UnknownObservation):
            build_setup(diamond, ["t1"], {"bot": [], "a": ["zz"], "b": [], "top": ["zz"]})

    def test_duplicate_observation_ids_rejected(self, diamond):
        with pytest.raises(ValidationError):
            setup_from_matrix(diamond, ["t", "t"], np.zeros((4, 2), dtype=bool))

    def test_empty_alpha_is_legal(self, diamond):
        s = build_setup(diamond, [], {e: [] for e in diamond.elements})
        assert s.alpha.shape == (4, 0)


class TestReflexive:
    def test_alpha(self, diamond):
        r = reflexive_setup(diamond)
        assert r.alpha_of("a") == ["a", "bot"]
        assert r.alpha_of("bot") == ["bot"]
        assert r.alpha_of("top") == sorted(diamond.elements)

    def test_too_large(self):
        u = build_universe(4)
        with pytest.raises(ModelTooLarge):
            reflexive_setup(u.model)


class TestAlphaHat:
    def test_reflexive(self, diamond):
        assert set(alpha_hat(reflexive_setup(diamond), "a").members) == {"a", "top"}

    def test_observed_by_bot(self, diamond):
        assert len(alpha_hat(reflexive_setup(diamond), "bot")) == 4

    def test_t1_pair(self):
        u = build_universe(2)
        h = alpha_hat(tk_setup(u, 1), "{(0,1)}")
        assert len(h) == 8
        assert all("(0,1)" in e for e in h.members)

    def test_unknown(self, two_obs):
        with pytest.raises(UnknownObservation):
            alpha_hat(two_obs, "nope")

    def test_abstraction_closed(self, two_obs, diamond):
        for t in two_obs.observations:
            h = alpha_hat(two_obs, t)
            assert up_closure(diamond, h) == h


class TestInducedObligations:
    def test_reflexive_diamond(self, diamond):
        got = {frozenset(R.members) for R in induced_obligations(reflexive_setup(diamond))}
        assert got == {
            frozenset({"top"}),
            frozenset({"a", "top"}),
            frozenset({"b", "top"}),
            frozenset(diamond.elements),
        }

    def test_no_observations(self, diamond):
        s = build_setup(diamond, [], {e: [] for e in diamond.elements})
        assert induced_obligations(s) == []

    def test_duplicates_collapse(self, diamond):
        s = build_setup(diamond, ["x", "y"], {"bot": [], "a": ["x", "y"], "b": [], "top": ["x", "y"]})
        out = induced_obligations(s)
        assert len(out) == 1 and out[0].name == "alpha_hat(x)"


class TestRefutable:
    def test_prohibition_reflexive(self, diamond):
        R = requirement(diamond, ["bot", "a"])
        rep = is_refutable(reflexive_setup(diamond), R)
        assert rep.holds and rep.blockers == ()
        assert rep.witnesses == {"b": "b", "top": "b"}

    def test_nontrivial_obligation_irrefutable(self, diamond):
        rep = is_refutable(reflexive_setup(diamond), requirement(diamond, ["a", "top"]))
        assert not rep.holds
        assert rep.verdict == "fails"

    def test_determinism_t1_t2(self):
        u = build_universe(2)
        P = builtin_requirement(u, "determinism")
        assert not is_refutable(tk_setup(u, 1), P).holds
        rep = is_refutable(tk_setup(u, 2), P)
        assert rep.holds
        for s, t in rep.witnesses.items():
            a, b = t.strip("()").split("),(")
            assert a.split(",")[0] == b.split(",")[0] and a != b
            assert t in tk_setup(u, 2).alpha_of(s)

    def test_mismatch(self, diamond, chain5):
        with pytest.raises(ModelMismatch):
            is_refutable(reflexive_setup(diamond), chain5.all())


class TestVerifiable:
    def test_nontrivial_prohibition(self, diamond, two_obs):
        R = requirement(diamond, ["bot", "a"])
        assert not is_verifiable(reflexive_setup(diamond), R).holds
        assert not is_verifiable(two_obs, R).holds

    def test_everything(self, diamond):
        assert is_verifiable(reflexive_setup(diamond), diamond.all()).holds

    def test_upset_verifiable_reflexive(self, diamond):
        rep = is_verifiable(reflexive_setup(diamond), requirement(diamond, ["a", "top"]))
        assert rep.holds and rep.witnesses == {"a": "a", "top": "a"}


class TestPermissive:
    def test_reflexive_is_most(self, diamond, two_obs):
        r = reflexive_setup(diamond)
        assert is_more_permissive(r, two_obs)
        assert is_more_permissive(r, two_obs, method="enumerate")

    def test_reflexive_relation(self, two_obs):
        assert is_more_permissive(two_obs, two_obs)

    def test_t2_vs_t1(self):
        u = build_universe(2)
        t1, t2 = tk_setup(u, 1), tk_setup(u, 2)
        assert is_more_permissive(t2, t1)
        assert not is_more_permissive(t1, t2)
        sep = separating_requirement(t1, t2)
        assert is_refutable(t2, sep).holds and not is_refutable(t1, sep).holds
        assert separating_requirement(t2, t1) is None

    def test_enumerate_cap(self):
        u = build_universe(2)
        with pytest.raises(ModelTooLarge):
            is_more_permissive(tk_setup(u, 2), tk_setup(u, 1), method="enumerate")

    def test_mismatch(self, diamond, chain5):
        with pytest.raises(ModelMismatch):
            is_more_permissive(reflexive_setup(diamond), reflexive_setup(chain5))

    def test_cover_agrees_with_enumeration(self):
        from testlimits.randgen import random_model, random_setup

        rng = np.random.default_rng(11)
        for _ in range(150):
            m = random_model(rng, 7)
            s1, s2 = random_setup(rng, m), random_setup(rng, m)
            assert is_more_permissive(s1, s2) == is_more_permissive(s1, s2, method="enumerate")


def test_theorem_checks_on_small_corpus():
    from testlimits.randgen import instances

    for model, setup, R in instances(seed=5, count=300):
        c = classify(model, R)
        if is_refutable(setup, R).holds:
            assert c.is_prohibition
        if is_verifiable(setup, R).holds:
            assert c.is_obligation
