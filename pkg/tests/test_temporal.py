from itertools import product

import numpy as np
import pytest

from testlimits import classify, is_refutable, is_verifiable, reflexive_setup
from testlimits.errors import ModelMismatch, ObservationSpaceTooLarge, UniverseTooLarge, ValidationError
from testlimits.temporal import (
    LassoWord,
    build_temporal_universe,
    decompose,
    eventually,
    is_hyper_safety,
    is_liveness,
    is_safety,
    nabla,
    never,
    prefixes,
    property_from,
    property_requirement,
    symbol_obligation,
    tstar_setup,
)


@pytest.fixture(scope="module")
def small():
    return build_temporal_universe("ab", 1, 1, 2)


@pytest.fixture(scope="module")
def loop2():
    return build_temporal_universe("ab", 1, 2, 2)


class TestLasso:
    def test_canonical_forms(self):
        assert LassoWord.of("a", "a") == LassoWord.of("", "a")
        assert LassoWord.of("", "abab") == LassoWord.of("", "ab")
        assert LassoWord.of("b", "ab") == LassoWord.of("", "ba")
        assert LassoWord.of("ab", "b") == LassoWord("a", "b")

    def test_equal_iff_same_word(self):
        words = {}
        for s in range(3):
            for stem in product("ab", repeat=s):
                for n in (1, 2, 3):
                    for loop in product("ab", repeat=n):
                        w = LassoWord.of(stem, loop)
                        key = ("".join(stem) + "".join(loop) * 16)[:16]
                        words.setdefault(w, set()).add(key)
                        assert w.unroll(16) == key
        assert all(len(v) == 1 for v in words.values())
        assert len(set().union(*words.values())) == len(words)

    def test_empty_loop(self):
        with pytest.raises(ValueError):
            LassoWord.of("a", "")

    def test_prefixes(self):
        assert prefixes(LassoWord.of("a", "b"), 3) == {"", "a", "ab", "abb"}
        assert prefixes(LassoWord.of("a", "b"), 0) == {""}
        assert prefixes(LassoWord.of("", "ab"), 4) == {"", "a", "ab", "aba", "abab"}


class TestUniverse:
    def test_small(self, small):
        assert {b.label for b in small.behaviors} == {"(a)^w", "(b)^w", "a(b)^w", "b(a)^w"}
        assert small.model.size == 16

    def test_unary(self):
        u = build_temporal_universe("a", 2, 3, 2)
        assert [b.label for b in u.behaviors] == ["(a)^w"]

    def test_loop2_contains_ab(self, loop2):
        assert LassoWord.of("", "ab") in loop2.behaviors
        assert len(loop2.behaviors) == 8

    def test_too_large(self):
        with pytest.raises(UniverseTooLarge):
            build_temporal_universe("abc", 2, 2, 2)

    def test_bad_alphabet(self):
        with pytest.raises(ValidationError):
            build_temporal_universe("", 1, 1)

    def test_unrolled_words_distinct(self, loop2):
        n = loop2.stem_bound + 2 * loop2.loop_bound**2
        assert len({b.unroll(n) for b in loop2.behaviors}) == len(loop2.behaviors)


class TestTstar:
    def test_empty_system(self, small):
        s = tstar_setup(small)
        assert s.alpha_of("{}") == ["{}"]

    def test_single_behavior(self, small):
        s = tstar_setup(small, set_cap=2)
        got = set(s.alpha_of(small.element(["(a)^w"])))
        words = ["ε", "a", "aa"]
        expect = {"{}"} | {"{" + w + "}" for w in words}
        expect |= {"{" + a + "," + b + "}" for i, a in enumerate(words) for b in words[i + 1 :]}
        assert got == expect

    def test_empty_observation_always(self, small):
        s = tstar_setup(small)
        assert s.alpha[:, s.obs_index("{}")].all()

    def test_cap(self, loop2):
        with pytest.raises(ObservationSpaceTooLarge):
            tstar_setup(loop2, set_cap=3, max_observations=50)


class TestSafetyLiveness:
    def test_never_b_safety(self, small):
        r = is_safety(small, never(small, "b"))
        assert r.holds and r.bad_prefixes["b(a)^w"] == "b"
        assert "stem<=1" in r.universe

    def test_everything_is_safe_and_live(self, small):
        top = property_from(small, [b.label for b in small.behaviors])
        assert is_safety(small, top).holds and is_liveness(small, top).holds

    def test_eventually_b_loop2(self, loop2):
        phi = eventually(loop2, "b")
        r = is_safety(loop2, phi)
        assert not r.holds and r.offenders == ("(a)^w",)
        # frozen per-universe verdict: every stored prefix extends into phi
        assert is_liveness(loop2, phi).holds

    def test_empty_not_live(self, small):
        r = is_liveness(small, property_from(small, []))
        assert not r.holds and r.stuck_prefix == ""

    def test_decompose_examples(self, small):
        everything = property_from(small, [b.label for b in small.behaviors])
        d = decompose(small, everything)
        assert d.safe == everything and d.live == everything
        d = decompose(small, property_from(small, []))
        assert not d.safe.mask.any() and d.live.mask.all()
        d = decompose(small, eventually(small, "b"))
        assert d.verified

    def test_nabla(self, small):
        assert nabla(small, property_from(small, [b.label for b in small.behaviors])) == []
        assert nabla(small, never(small, "b")) == ["b", "ab", "ba", "bb"]
        assert nabla(small, property_from(small, [])) == list(small.words)

    def test_nabla_words_are_irremediable(self, loop2):
        phi = eventually(loop2, "a")
        for w in nabla(loop2, phi):
            for b in loop2.behaviors:
                if b.unroll(len(w)) == w:
                    assert b not in phi.universe.behaviors or not phi.mask[loop2.behavior(b)]


class TestRequirements:
    def test_property_requirement(self, small):
        everything = property_from(small, [b.label for b in small.behaviors])
        assert property_requirement(small, everything).mask.all()
        assert property_requirement(small, property_from(small, [])).sorted_members() == ["{}"]
        R = property_requirement(small, property_from(small, ["(a)^w"]))
        assert set(R.members) == {"{}", "{(a)^w}"}

    def test_always_prohibition_and_reflexive_refutable(self, small):
        r = reflexive_setup(small.model)
        for bits in range(16):
            phi = property_from(small, [b.label for i, b in enumerate(small.behaviors) if bits >> i & 1])
            R = property_requirement(small, phi)
            assert classify(small.model, R).is_prohibition
            assert is_refutable(r, R).holds

    def test_tstar_verifiable_property_is_trivial(self, small):
        s = tstar_setup(small)
        for bits in range(16):
            phi = property_from(small, [b.label for i, b in enumerate(small.behaviors) if bits >> i & 1])
            R = property_requirement(small, phi)
            if is_verifiable(s, R).holds:
                assert R.is_trivial

    def test_hyper_safety(self, small):
        R_b = symbol_obligation(small, "b")
        assert not is_hyper_safety(small, R_b)
        assert is_verifiable(tstar_setup(small), R_b).holds
        assert is_hyper_safety(small, small.model.all())
        assert is_hyper_safety(small, property_requirement(small, never(small, "b")))

    def test_hyper_safety_mismatch(self, small, loop2):
        with pytest.raises(ModelMismatch):
            is_hyper_safety(small, loop2.model.all())

    def test_foreign_property(self, small, loop2):
        with pytest.raises(ValidationError):
            is_safety(small, never(loop2, "b"))


def test_shallow_prefixes_hide_late_symbols(loop2):
    # b(ba)^w starts "bba": at depth 2 the a is out of sight
    assert not is_verifiable(tstar_setup(loop2), symbol_obligation(loop2, "a")).holds
    deep = build_temporal_universe("ab", 1, 2, 3)
    assert is_verifiable(tstar_setup(deep), symbol_obligation(deep, "a")).holds
