"""Stepwise enumerators, the dovetailing scheduler and the refutation engine.

An :class:`Enumerator` is a computation advanced one step at a time; each
``step()`` returns a :class:`Step` that is ``YIELDED`` with an item,
``WORKING`` or ``EXHAUSTED``.  Once exhausted it stays exhausted.
Duplicate yields are allowed; consumers deduplicate.

:class:`Dovetail` interleaves a possibly infinite, possibly growing list
of enumerators in stages: stage ``n`` gives ``n`` consecutive steps to
each of the first ``n`` constituents.  One scheduler tick is one step of
one constituent, and budgets are counted in ticks.
"""
import enum
import os
import selectors
import shlex
import subprocess
import time
from dataclasses import dataclass, field
from typing import Any, NamedTuple

import numpy as np

from . import kernels
from .eio import EioSystem
from .errors import ProtocolViolation, SpawnFailure
from .order import check_model

__all__ = [
    "Status",
    "Step",
    "WORK",
    "WORKING",
    "EXHAUSTED",
    "Enumerator",
    "GeneratorEnumerator",
    "enumerator",
    "scripted",
    "stall",
    "from_iterable",
    "Dovetail",
    "dovetail",
    "LogRecord",
    "OmegaOracle",
    "CampaignVerdict",
    "omega_set",
    "algorithm1",
    "Decision",
    "weak_enforce",
    "enforcement_decisions",
    "SubprocessEnumerator",
    "subprocess_enumerator",
    "NAMED_OMEGAS",
]


class Status(enum.Enum):
    YIELDED = "Yielded"
    WORKING = "Working"
    EXHAUSTED = "Exhausted"


class Step(NamedTuple):
    status: Status
    item: Any = None


WORKING = Step(Status.WORKING)
EXHAUSTED = Step(Status.EXHAUSTED)


class _Work:
    def __repr__(self):
        return "WORK"


#: marker a generator yields to spend a step without producing anything
WORK = _Work()


class Enumerator:
    def step(self):
        raise NotImplementedError

    def close(self):
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class GeneratorEnumerator(Enumerator):
    """Each ``next()`` of the wrapped generator is one step.

    The generator yields :data:`WORK` for a silent step and anything
    else as an item; returning ends the enumeration.
    """

    def __init__(self, gen):
        self._gen = gen
        self._done = False

    def step(self):
        if self._done:
            return EXHAUSTED
        try:
            x = next(self._gen)
        except StopIteration:
            self._done = True
            return EXHAUSTED
        if x is WORK:
            return WORKING
        return Step(Status.YIELDED, x)

    def close(self):
        close = getattr(self._gen, "close", None)
        if close is not None:
            close()


def enumerator(gen):
    return GeneratorEnumerator(gen)


def _stall_forever():
    while True:
        yield WORK


def stall():
    """Never yields, never finishes."""
    return GeneratorEnumerator(_stall_forever())


def scripted(schedule, then="exhaust"):
    """Play ``schedule`` (items and :data:`WORK` markers) one per step,
    then either exhaust or stall forever (``then="stall"``)."""
    if then not in ("exhaust", "stall"):
        raise ValueError("then must be 'exhaust' or 'stall'")

    def run():
        yield from schedule
        if then == "stall":
            yield from _stall_forever()

    return GeneratorEnumerator(run())


def from_iterable(items):
    return GeneratorEnumerator(iter(items))


@dataclass(frozen=True)
class LogRecord:
    step: int
    enum: str
    event: Status
    item: Any = None

    def format(self):
        item = "" if self.item is None else str(self.item)
        return f"step={self.step} enum={self.enum} event={self.event.value} item={item}"


def _is_exhausted(member):
    return member[1]


class Dovetail(Enumerator):
    """Fair stage-wise interleaving of enumerators.

    ``enumerators`` may be any iterable, including an infinite generator;
    constituent ``i`` is pulled from it when stage ``i + 1`` first needs
    it.  :meth:`spawn` appends further constituents while running.
    """

    def __init__(self, enumerators=(), names=None, log=False):
        self._source = iter(enumerators)
        self._source_done = False
        self._names = list(names) if names is not None else []
        self._members = []  # [enumerator, exhausted, name]
        self.ticks = 0
        self.stage = 0
        self.last_index = None
        self.log = [] if log else None
        self._plan = self._schedule()

    def __len__(self):
        return len(self._members)

    def _pull(self, i):
        while len(self._members) <= i and not self._source_done:
            try:
                e = next(self._source)
            except StopIteration:
                self._source_done = True
                break
            self._add(e)
        return i < len(self._members)

    def _add(self, e, name=None):
        k = len(self._members)
        if name is None:
            name = self._names[k] if k < len(self._names) else str(k)
        self._members.append([e, False, name])
        return k

    def spawn(self, e, name=None):
        """Add a constituent; it joins from the next stage that covers its index."""
        self._pull(len(self._members))
        return self._add(e, name)

    def name(self, i):
        return self._members[i][2]

    def _schedule(self):
        n = 0
        while True:
            n += 1
            self.stage = n
            for i in range(n):
                if not self._pull(i):
                    break
                for _ in range(n):
                    if self._members[i][1]:
                        break
                    yield i
            # an empty stage is reported to step() so it can detect the end
            yield None

    def step(self):
        idle_stages = 0
        while True:
            i = next(self._plan)
            if i is None:
                if self._all_done():
                    idle_stages += 1
                    if idle_stages > 1:
                        return EXHAUSTED
                continue
            idle_stages = 0
            member = self._members[i]
            st = member[0].step()
            self.ticks += 1
            self.last_index = i
            if st.status is Status.EXHAUSTED:
                member[1] = True
            if self.log is not None:
                self.log.append(LogRecord(self.ticks, member[2], st.status, st.item))
            if st.status is Status.EXHAUSTED:
                return WORKING
            return st

    def _all_done(self):
        if not self._source_done:
            self._pull(len(self._members))
        return self._source_done and all(m[1] for m in self._members)

    def close(self):
        for m in self._members:
            m[0].close()


def dovetail(enumerators, names=None, log=False):
    return Dovetail(enumerators, names=names, log=log)


class OmegaOracle:
    """Semi-decision procedure for the irremediable observations.

    ``probe(t)`` returns an enumerator that yields ``t`` once membership
    of ``t`` is confirmed and otherwise never yields it.
    """

    def __init__(self, probe, name="omega", enumerate=None):
        self._probe = probe
        self.name = name
        self._enumerate = enumerate

    def probe(self, t):
        return self._probe(t)

    def enumerate(self):
        if self._enumerate is None:
            raise TypeError(f"oracle {self.name!r} has no enumerator")
        return self._enumerate()

    @classmethod
    def from_enumerator(cls, factory, name="omega"):
        """Membership of ``t`` is confirmed when a fresh run of
        ``factory()`` yields ``t``."""

        def probe(t):
            def run():
                e = factory()
                try:
                    while True:
                        st = e.step()
                        if st.status is Status.EXHAUSTED:
                            return
                        if st.status is Status.YIELDED and st.item == t:
                            yield t
                            return
                        yield WORK
                finally:
                    e.close()

            return GeneratorEnumerator(run())

        return cls(probe, name, enumerate=factory)

    @classmethod
    def from_predicate(cls, pred, cost=1, name="omega"):
        """Decidable membership: after ``cost`` steps, yield ``t`` if
        ``pred(t)`` holds, else finish without yielding."""

        def probe(t):
            def run():
                for _ in range(cost - 1):
                    yield WORK
                if pred(t):
                    yield t

            return GeneratorEnumerator(run())

        return cls(probe, name)

    @classmethod
    def from_set(cls, members, name="omega"):
        members = list(members)
        return cls.from_enumerator(lambda: from_iterable(members), name)


def _odd_zero(t):
    return any(i % 2 == 1 and o == 0 for i, o in t)


def _zero(t):
    return any(o == 0 for _, o in t)


#: named oracles over input-output observations (sets of pairs)
NAMED_OMEGAS = {
    "odd-zero": lambda: OmegaOracle.from_predicate(_odd_zero, name="odd-zero"),
    "zero": lambda: OmegaOracle.from_predicate(_zero, name="zero"),
}


def omega_set(setup, R):
    """Exact set of irremediable observations of ``R`` in a finite setup."""
    check_model(setup.model, R)
    omega = kernels.irremediable(setup.alpha, R.mask)
    return frozenset(setup.observations[t] for t in np.flatnonzero(omega))


@dataclass(frozen=True)
class CampaignVerdict:
    outcome: str  # "Refuted" or "BudgetExhausted"
    witness: Any
    steps_used: int
    log: tuple = field(default=(), repr=False)
    all_exhausted: bool = False

    @property
    def refuted(self):
        return self.outcome == "Refuted"

    def log_lines(self):
        return [r.format() for r in self.log]


def algorithm1(system_enum, omega, budget, log=True):
    """Search for an observation of the system that the oracle confirms
    as irremediable.

    The system enumerator and one membership probe per distinct observed
    item are dovetailed together.  Stops with ``Refuted`` as soon as a
    probe confirms, or ``BudgetExhausted`` after ``budget`` ticks.  A
    budget verdict is inconclusive: it never means the system satisfies
    the requirement.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    sched = Dovetail([system_enum], names=["system"], log=log)
    probed = {}
    seen = set()
    exhausted = False
    try:
        while sched.ticks < budget:
            st = sched.step()
            if st.status is Status.EXHAUSTED:
                exhausted = True
                break
            if st.status is not Status.YIELDED:
                continue
            src = sched.last_index
            if src == 0:
                if st.item not in seen:
                    seen.add(st.item)
                    k = sched.spawn(omega.probe(st.item), name=f"{omega.name}[{st.item}]")
                    probed[k] = st.item
            elif src in probed:
                return CampaignVerdict("Refuted", probed[src], sched.ticks, tuple(sched.log or ()))
        return CampaignVerdict("BudgetExhausted", None, sched.ticks, tuple(sched.log or ()), exhausted)
    finally:
        sched.close()


class Decision(NamedTuple):
    observation: Any
    verdict: str  # "Permit" or "Stall"
    step: Any = None


def weak_enforce(observations, co_omega, budget):
    """Monitor that permits an observation once it is confirmed to lie
    outside the irremediable set.

    ``co_omega`` semi-decides the complement of the irremediable set.
    Yields a ``Permit`` decision as each confirmation arrives; when the
    budget runs out every still-pending observation is reported as
    ``Stall``.
    """
    sched = Dovetail([from_iterable(observations)], names=["input"])
    pending = {}
    order = []
    try:
        while sched.ticks < budget:
            st = sched.step()
            if st.status is Status.EXHAUSTED:
                break
            if st.status is not Status.YIELDED:
                continue
            src = sched.last_index
            if src == 0:
                if st.item in order:
                    continue
                order.append(st.item)
                k = sched.spawn(co_omega.probe(st.item), name=f"{co_omega.name}[{st.item}]")
                pending[k] = st.item
            elif src in pending:
                yield Decision(pending.pop(src), "Permit", sched.ticks)
        for t in pending.values():
            yield Decision(t, "Stall")
    finally:
        sched.close()


def enforcement_decisions(observations, co_omega, budget):
    return {d.observation: d for d in weak_enforce(observations, co_omega, budget)}


class _Exchange:
    __slots__ = ("value", "proc", "buf", "done")

    def __init__(self, value):
        self.value = value
        self.proc = None
        self.buf = b""
        self.done = False


class SubprocessEnumerator(Enumerator):
    """Enumerates the observations of a black-box process.

    Each input runs in its own process instance (its own input stream):
    the input is written as one decimal line and the first line of output
    is the answer.  A step gives one pending exchange at most
    ``step_quantum`` seconds; exchanges are served round-robin.  An
    exchange that has not answered stays pending, so a diverging input
    never blocks the others and is never reported as absent.
    """

    def __init__(self, command, input_schedule, step_quantum=0.01):
        self.argv = shlex.split(command) if isinstance(command, str) else list(command)
        self.quantum = step_quantum
        self._pending = [_Exchange(int(v)) for v in input_schedule]
        self._all = list(self._pending)
        self._cursor = 0
        self._sel = selectors.DefaultSelector()

    def _start(self, ex):
        try:
            ex.proc = subprocess.Popen(
                self.argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
            )
        except OSError as exc:
            raise SpawnFailure(f"cannot spawn {self.argv!r}: {exc}") from exc
        os.set_blocking(ex.proc.stdout.fileno(), False)
        try:
            ex.proc.stdin.write(f"{ex.value}\n".encode())
            ex.proc.stdin.flush()
        except BrokenPipeError:
            pass

    def _advance(self, ex):
        if ex.proc is None:
            self._start(ex)
        out = ex.proc.stdout
        key = self._sel.register(out, selectors.EVENT_READ)
        try:
            deadline = time.monotonic() + self.quantum
            while b"\n" not in ex.buf:
                left = deadline - time.monotonic()
                if left <= 0 or not self._sel.select(left):
                    return None
                chunk = out.read()
                if chunk is None:
                    continue
                if not chunk:  # EOF without a full line
                    if ex.buf.strip():
                        break
                    ex.done = True
                    return None
                ex.buf += chunk
        finally:
            self._sel.unregister(key.fileobj)
        line = ex.buf.split(b"\n", 1)[0].decode(errors="replace").strip()
        ex.done = True
        self._stop(ex)
        try:
            answer = int(line)
        except ValueError:
            raise ProtocolViolation(line, ex.value) from None
        return EioSystem.of([(ex.value, answer)])

    def step(self):
        if not self._pending:
            return EXHAUSTED
        self._cursor %= len(self._pending)
        ex = self._pending[self._cursor]
        obs = self._advance(ex)
        if ex.done:
            self._pending.pop(self._cursor)
        else:
            self._cursor += 1
        if obs is not None:
            return Step(Status.YIELDED, obs)
        return WORKING

    @staticmethod
    def _stop(ex):
        p = ex.proc
        if p is None:
            return
        if p.poll() is None:
            p.kill()
        p.wait()
        for f in (p.stdin, p.stdout):
            try:
                f.close()
            except OSError:
                pass

    def close(self):
        for ex in self._all:
            self._stop(ex)
        self._sel.close()


def subprocess_enumerator(command, input_schedule, step_quantum=0.01):
    return SubprocessEnumerator(command, input_schedule, step_quantum)
