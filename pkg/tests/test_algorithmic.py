import sys

import pytest

from conftest import stub
from testlimits.algorithmic import (
    EXHAUSTED,
    NAMED_OMEGAS,
    WORK,
    Dovetail,
    OmegaOracle,
    Status,
    algorithm1,
    dovetail,
    enforcement_decisions,
    from_iterable,
    omega_set,
    scripted,
    stall,
    subprocess_enumerator,
    weak_enforce,
)
from testlimits import build_setup, reflexive_setup, requirement
from testlimits.eio import EioSystem, build_universe, builtin_requirement, tk_setup
from testlimits.errors import ProtocolViolation, SpawnFailure

W30 = EioSystem.of([(3, 0)])


def drain(e, limit=10_000):
    out = []
    for _ in range(limit):
        st = e.step()
        if st.status is Status.EXHAUSTED:
            return out
        if st.status is Status.YIELDED:
            out.append(st.item)
    raise AssertionError("enumerator did not finish")


class TestEnumerators:
    def test_exhausted_is_sticky(self):
        e = from_iterable([1])
        assert e.step().item == 1
        assert e.step() is EXHAUSTED
        assert e.step() is EXHAUSTED

    def test_scripted_then_stall(self):
        e = scripted([WORK, 5], then="stall")
        assert e.step().status is Status.WORKING
        assert e.step().item == 5
        assert all(e.step().status is Status.WORKING for _ in range(50))

    def test_scripted_bad_mode(self):
        with pytest.raises(ValueError):
            scripted([], then="loop")


class TestDovetail:
    def test_single_enumerator_passthrough(self):
        assert drain(dovetail([from_iterable([4, 5, 6])])) == [4, 5, 6]

    def test_two_finite_golden_log(self):
        d = dovetail([from_iterable([1, 2]), from_iterable([3])], log=True)
        assert drain(d) == [1, 2, 3]
        assert [r.format() for r in d.log] == [
            "step=1 enum=0 event=Yielded item=1",
            "step=2 enum=0 event=Yielded item=2",
            "step=3 enum=0 event=Exhausted item=",
            "step=4 enum=1 event=Yielded item=3",
            "step=5 enum=1 event=Exhausted item=",
        ]

    def test_stalling_neighbour(self):
        d = dovetail([stall(), scripted([WORK, WORK, "v"])])
        seen = []
        for _ in range(100):
            st = d.step()
            if st.status is Status.YIELDED:
                seen.append(st.item)
                break
        assert seen == ["v"]

    def test_infinite_constituent_stream(self):
        def forever():
            n = 0
            while True:
                yield from_iterable([n])
                n += 1

        d = Dovetail(forever())
        got = set()
        for _ in range(400):
            st = d.step()
            if st.status is Status.YIELDED:
                got.add(st.item)
        assert set(range(10)) <= got

    def test_spawn(self):
        d = Dovetail([from_iterable([1])])
        k = d.spawn(from_iterable([2]), name="late")
        assert d.name(k) == "late"
        assert sorted(drain(d)) == [1, 2]

    @pytest.mark.parametrize("i,s", [(0, 1), (0, 5), (3, 1), (2, 4), (5, 5), (6, 2)])
    def test_fairness_bound(self, i, s):
        members = [stall() for _ in range(i)] + [scripted([WORK] * (s - 1) + ["x"], then="stall")]
        members += [stall() for _ in range(3)]
        d = Dovetail(members)
        while True:
            st = d.step()
            if st.status is Status.YIELDED:
                break
        assert d.stage <= max(i, s) + 1


class TestOmega:
    def test_never_zero_odd_bound4(self):
        u = build_universe(4)
        om = omega_set(tk_setup(u, 1), builtin_requirement(u, "never_zero_odd"))
        assert om == {"{(1,0)}", "{(3,0)}"}

    def test_everything(self):
        u = build_universe(2)
        assert omega_set(tk_setup(u, 1), u.model.all()) == frozenset()

    def test_bot_on_reflexive_diamond(self, diamond):
        assert omega_set(reflexive_setup(diamond), requirement(diamond, ["bot"])) == {"a", "b", "top"}

    def test_from_set_probe(self):
        o = OmegaOracle.from_set(["x", "y"])
        assert drain(o.probe("y")) == ["y"]
        assert drain(o.probe("z")) == []
        assert drain(o.enumerate()) == ["x", "y"]

    def test_predicate_cost(self):
        o = OmegaOracle.from_predicate(lambda t: True, cost=4)
        p = o.probe("t")
        assert [p.step().status for _ in range(4)] == [Status.WORKING] * 3 + [Status.YIELDED]

    def test_named(self):
        assert drain(NAMED_OMEGAS["odd-zero"]().probe(W30)) == [W30]
        assert drain(NAMED_OMEGAS["odd-zero"]().probe(EioSystem.of([(2, 0)]))) == []


class TestAlgorithm1:
    def test_yield_at_step_5(self):
        sys_enum = scripted([WORK] * 4 + [W30])
        v = algorithm1(sys_enum, NAMED_OMEGAS["odd-zero"](), 100)
        assert v.refuted and v.witness == W30

    def test_disjoint_exhausts(self):
        sys_enum = scripted([EioSystem.of([(1, 1)]), EioSystem.of([(2, 0)])], then="stall")
        v = algorithm1(sys_enum, NAMED_OMEGAS["odd-zero"](), 1000)
        assert v.outcome == "BudgetExhausted" and v.witness is None and v.steps_used == 1000

    def test_finite_disjoint_reports_exhaustion(self):
        v = algorithm1(from_iterable([EioSystem.of([(1, 1)])]), NAMED_OMEGAS["odd-zero"](), 1000)
        assert not v.refuted and v.all_exhausted

    def test_fairness_golden(self):
        # frozen by hand-simulating the stage schedule
        branches = dovetail([stall(), scripted([WORK, W30])])
        v = algorithm1(branches, NAMED_OMEGAS["odd-zero"](), 7)
        assert v.refuted and v.steps_used == 7
        assert v.log_lines() == [
            "step=1 enum=system event=Working item=",
            "step=2 enum=system event=Working item=",
            "step=3 enum=system event=Working item=",
            "step=4 enum=system event=Working item=",
            "step=5 enum=system event=Yielded item={(3,0)}",
            "step=6 enum=system event=Working item=",
            "step=7 enum=odd-zero[{(3,0)}] event=Yielded item={(3,0)}",
        ]
        assert not algorithm1(dovetail([stall(), scripted([WORK, W30])]), NAMED_OMEGAS["odd-zero"](), 6).refuted

    def test_duplicates_probed_once(self):
        sys_enum = from_iterable([EioSystem.of([(2, 2)])] * 5)
        v = algorithm1(sys_enum, NAMED_OMEGAS["odd-zero"](), 200)
        assert sum("odd-zero[" in line for line in v.log_lines() if "Yielded" in line) == 0
        assert len({line.split()[1] for line in v.log_lines()}) == 2

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            algorithm1(stall(), NAMED_OMEGAS["zero"](), 0)

    def test_soundness_on_finite_setup(self):
        u = build_universe(2)
        t1 = tk_setup(u, 1)
        R = builtin_requirement(u, "determinism")
        om = omega_set(t1, R)
        for t in t1.observations:
            v = algorithm1(from_iterable([t]), OmegaOracle.from_set(sorted(om)), 100)
            assert v.refuted == (t in om)


class TestWeakEnforce:
    def test_permit_after_probe_steps(self):
        co = OmegaOracle.from_predicate(lambda t: True, cost=4)
        d = list(weak_enforce(["t"], co, 100))
        assert d[0].verdict == "Permit"

    def test_stall_for_omega_member(self):
        co = OmegaOracle.from_predicate(lambda t: t != "bad")
        d = enforcement_decisions(["ok", "bad"], co, 10_000)
        assert d["ok"].verdict == "Permit" and d["bad"].verdict == "Stall"

    def test_pending_at_budget_stalls(self):
        co = OmegaOracle.from_predicate(lambda t: True, cost=1000)
        d = enforcement_decisions(["t"], co, 50)
        assert d["t"].verdict == "Stall"


class TestSubprocess:
    def test_echo(self):
        e = subprocess_enumerator([sys.executable, stub("echo.py")], [0, 1], step_quantum=2.0)
        try:
            assert drain(e) == [EioSystem.of([(0, 0)]), EioSystem.of([(1, 1)])]
        finally:
            e.close()

    def test_stall_on_zero(self):
        e = subprocess_enumerator([sys.executable, stub("stall_zero.py")], [0, 1], step_quantum=0.05)
        got = []
        try:
            for _ in range(40):
                st = e.step()
                assert st.status is not Status.EXHAUSTED
                if st.status is Status.YIELDED:
                    got.append(st.item)
        finally:
            e.close()
        assert got == [EioSystem.of([(1, 7)])]
        assert all(ex.proc is None or ex.proc.poll() is not None for ex in e._all)

    def test_hello_is_protocol_violation(self):
        e = subprocess_enumerator([sys.executable, stub("hello.py")], [0], step_quantum=2.0)
        with pytest.raises(ProtocolViolation):
            try:
                drain(e)
            finally:
                e.close()

    def test_silent_exchange_completes_without_yield(self):
        e = subprocess_enumerator([sys.executable, stub("silent.py")], [0, 1], step_quantum=2.0)
        try:
            assert drain(e) == []
        finally:
            e.close()

    def test_spawn_failure(self):
        e = subprocess_enumerator("/nonexistent/binary", [0])
        with pytest.raises(SpawnFailure):
            e.step()
        e.close()

    def test_campaign_against_stub(self):
        e = subprocess_enumerator([sys.executable, stub("odd_zero.py")], [0, 1, 2, 3])
        try:
            v = algorithm1(e, NAMED_OMEGAS["odd-zero"](), 500)
        finally:
            e.close()
        assert v.refuted and v.witness == W30
