"""Bounded temporal universes over lasso words, and the finite-prefix setup.

Behaviors are ultimately periodic infinite words ``stem . loop^w`` kept
in canonical form, so each infinite word has exactly one representative.
A universe fixes an alphabet and bounds on stem and loop length; its
systems are all sets of those behaviors.

Safety, liveness and the irremediable-prefix set are decided relative to
the universe: "every infinite extension" ranges over the universe's
behaviors and finite prefixes are taken up to ``prefix_depth``.  Every
verdict carries the universe label for that reason.
"""
from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np

from . import kernels
from .errors import ObservationSpaceTooLarge, UniverseTooLarge, ValidationError
from .order import Requirement, check_model, powerset_model
from .testsetup import is_refutable, setup_from_matrix

__all__ = [
    "LassoWord",
    "TemporalUniverse",
    "TemporalProperty",
    "SafetyReport",
    "LivenessReport",
    "Decomposition",
    "build_temporal_universe",
    "prefixes",
    "tstar_setup",
    "is_safety",
    "is_liveness",
    "decompose",
    "property_requirement",
    "symbol_obligation",
    "is_hyper_safety",
    "nabla",
    "never",
    "eventually",
    "infinitely_often",
    "property_from",
]

MAX_BEHAVIORS = 12
MAX_TSTAR_OBSERVATIONS = 50_000
MAX_ALPHA_CELLS = 1 << 26
DEFAULT_SET_CAP = 3
DEFAULT_DEPTH = 4
EPSILON = "ε"


def _primitive_root(w):
    n = len(w)
    for p in range(1, n + 1):
        if n % p == 0 and w[:p] * (n // p) == w:
            return w[:p]
    return w


@dataclass(frozen=True, order=True)
class LassoWord:
    """Infinite word ``stem loop loop loop ...`` in canonical form.

    Build with :meth:`of`, which makes the loop primitive and rotates
    trailing stem letters into the loop.  Canonical words are equal iff
    they denote the same infinite word.
    """

    stem: str
    loop: str

    @classmethod
    def of(cls, stem, loop):
        stem, loop = "".join(stem), "".join(loop)
        if not loop:
            raise ValueError("loop must be nonempty")
        loop = _primitive_root(loop)
        while stem and stem[-1] == loop[-1]:
            stem = stem[:-1]
            loop = loop[-1] + loop[:-1]
        return cls(stem, loop)

    def unroll(self, n):
        out = self.stem
        while len(out) < n:
            out += self.loop
        return out[:n]

    def letter(self, i):
        if i < len(self.stem):
            return self.stem[i]
        return self.loop[(i - len(self.stem)) % len(self.loop)]

    def contains(self, symbol):
        return symbol in self.stem or symbol in self.loop

    @property
    def label(self):
        return f"{self.stem}({self.loop})^w"

    def __str__(self):
        return self.label


def prefixes(w, depth):
    """Finite prefixes of ``w`` of length 0..depth, the empty word included."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    full = w.unroll(depth)
    return {full[:n] for n in range(depth + 1)}


def _word_label(w):
    return w if w else EPSILON


class TemporalUniverse:
    def __init__(self, alphabet, stem_bound, loop_bound, prefix_depth, behaviors):
        self.alphabet = tuple(alphabet)
        self.stem_bound = stem_bound
        self.loop_bound = loop_bound
        self.prefix_depth = prefix_depth
        self.behaviors = tuple(behaviors)
        self._bindex = {b: i for i, b in enumerate(self.behaviors)}
        self.model = powerset_model([b.label for b in self.behaviors])
        self.words = tuple(
            "".join(p) for n in range(prefix_depth + 1) for p in product(self.alphabet, repeat=n)
        )
        self._windex = {w: i for i, w in enumerate(self.words)}
        pref = np.zeros((len(self.behaviors), len(self.words)), dtype=np.bool_)
        for b, beh in enumerate(self.behaviors):
            for p in prefixes(beh, prefix_depth):
                pref[b, self._windex[p]] = True
        pref.setflags(write=False)
        self.prefix_matrix = pref
        self._tstar = {}

    @property
    def label(self):
        return (
            f"temporal(alphabet={''.join(self.alphabet)},stem<={self.stem_bound},"
            f"loop<={self.loop_bound},depth={self.prefix_depth})"
        )

    def __repr__(self):
        return f"<TemporalUniverse {self.label}: {len(self.behaviors)} behaviors>"

    def behavior(self, spec):
        """Look up a behavior by :class:`LassoWord` or label."""
        if isinstance(spec, LassoWord):
            key = LassoWord.of(spec.stem, spec.loop)
        else:
            key = next((b for b in self.behaviors if b.label == spec), None)
        if key not in self._bindex:
            raise ValidationError(f"behavior {spec!s} is not in {self.label}")
        return self._bindex[key]

    def word_index(self, w):
        return self._windex[w]

    def system_index(self, behaviors):
        m = 0
        for b in behaviors:
            m |= 1 << self.behavior(b)
        return m

    def element(self, behaviors):
        return self.model.elements[self.system_index(behaviors)]


def build_temporal_universe(alphabet, stem_bound, loop_bound, prefix_depth=DEFAULT_DEPTH, cap=MAX_BEHAVIORS):
    """Enumerate all canonical lassos within the bounds.

    ``stem_bound`` may be 0 (purely periodic behaviors only).
    """
    alphabet = sorted(set(alphabet))
    if not alphabet or any(len(a) != 1 for a in alphabet):
        raise ValidationError("alphabet must be a nonempty set of single-character symbols")
    if stem_bound < 0 or loop_bound < 1 or prefix_depth < 0:
        raise ValidationError("need stem_bound >= 0, loop_bound >= 1, prefix_depth >= 0")
    seen = set()
    for s in range(stem_bound + 1):
        for stem in product(alphabet, repeat=s):
            for n in range(1, loop_bound + 1):
                for loop in product(alphabet, repeat=n):
                    seen.add(LassoWord.of(stem, loop))
                    if len(seen) > cap:
                        raise UniverseTooLarge(
                            f"more than {cap} behaviors (2^{cap} systems); lower the bounds"
                        )
    behaviors = sorted(seen, key=lambda b: (len(b.stem) + len(b.loop), b.label))
    return TemporalUniverse(alphabet, stem_bound, loop_bound, prefix_depth, behaviors)


@dataclass(frozen=True, eq=False)
class TemporalProperty:
    """A set of behaviors of one universe."""

    universe: TemporalUniverse = field(repr=False)
    mask: np.ndarray = field(repr=False)
    name: str = ""

    def __post_init__(self):
        m = np.ascontiguousarray(self.mask, dtype=np.bool_)
        if m.shape != (len(self.universe.behaviors),):
            raise ValidationError("property mask does not match the universe's behaviors")
        m.setflags(write=False)
        object.__setattr__(self, "mask", m)

    @property
    def members(self):
        return [b.label for b, keep in zip(self.universe.behaviors, self.mask) if keep]

    def __contains__(self, w):
        return bool(self.mask[self.universe.behavior(w)])

    def __eq__(self, other):
        if not isinstance(other, TemporalProperty):
            return NotImplemented
        return self.universe is other.universe and np.array_equal(self.mask, other.mask)

    def __hash__(self):
        return hash(self.mask.tobytes())

    def __repr__(self):
        return f"TemporalProperty({self.name!r}, {self.members})"

    @property
    def bits(self):
        """Element index of the system whose behaviors are exactly this set."""
        return int(sum(1 << i for i in np.flatnonzero(self.mask)))


def property_from(universe, members, name=""):
    mask = np.zeros(len(universe.behaviors), dtype=np.bool_)
    for b in members:
        mask[universe.behavior(b)] = True
    return TemporalProperty(universe, mask, name)


def _where(universe, pred, name):
    return TemporalProperty(universe, np.array([bool(pred(b)) for b in universe.behaviors]), name)


def never(universe, symbol):
    return _where(universe, lambda b: not b.contains(symbol), f"never_{symbol}")


def eventually(universe, symbol):
    return _where(universe, lambda b: b.contains(symbol), f"eventually_{symbol}")


def infinitely_often(universe, symbol):
    return _where(universe, lambda b: symbol in b.loop, f"infinitely_often_{symbol}")


def _check_prop(universe, phi):
    if phi.universe is not universe:
        raise ValidationError(f"property {phi.name!r} belongs to another universe")


def _extendable(universe, phi):
    # word w has some universe extension inside phi
    return (universe.prefix_matrix & phi.mask[:, None]).any(axis=0)


def nabla(universe, phi):
    """Irremediable words: no universe behavior extending them is in ``phi``.

    Words with no universe extension at all are included vacuously.
    Returned shortest first, then lexicographically.
    """
    _check_prop(universe, phi)
    ext = _extendable(universe, phi)
    return [w for w, ok in zip(universe.words, ext) if not ok]


@dataclass(frozen=True)
class SafetyReport:
    holds: bool
    bad_prefixes: dict
    offenders: tuple
    universe: str

    @property
    def verdict(self):
        return "safety" if self.holds else "not-safety"


@dataclass(frozen=True)
class LivenessReport:
    holds: bool
    stuck_prefix: object
    universe: str

    @property
    def verdict(self):
        return "liveness" if self.holds else "not-liveness"


def is_safety(universe, phi):
    """Every violating behavior has an irremediable prefix."""
    _check_prop(universe, phi)
    ext = _extendable(universe, phi)
    bad = {}
    offenders = []
    for b, beh in enumerate(universe.behaviors):
        if phi.mask[b]:
            continue
        hit = next((universe.words[w] for w in np.flatnonzero(universe.prefix_matrix[b]) if not ext[w]), None)
        if hit is None:
            offenders.append(beh.label)
        else:
            bad[beh.label] = hit
    return SafetyReport(not offenders, bad, tuple(offenders), universe.label)


def is_liveness(universe, phi):
    """Every prefix of some universe behavior extends into ``phi``."""
    _check_prop(universe, phi)
    ext = _extendable(universe, phi)
    live_words = universe.prefix_matrix.any(axis=0)
    stuck = np.flatnonzero(live_words & ~ext)
    sigma = universe.words[stuck[0]] if stuck.size else None
    return LivenessReport(stuck.size == 0, sigma, universe.label)


@dataclass(frozen=True)
class Decomposition:
    safe: TemporalProperty
    live: TemporalProperty
    safe_is_safety: bool
    live_is_liveness: bool
    meet_is_phi: bool

    @property
    def verified(self):
        return self.safe_is_safety and self.live_is_liveness and self.meet_is_phi


def decompose(universe, phi):
    """Split ``phi`` into a safety part (its closure) and a liveness part."""
    _check_prop(universe, phi)
    ext = _extendable(universe, phi)
    # closure: behaviors none of whose prefixes is irremediable
    safe_mask = ~(universe.prefix_matrix & ~ext[None, :]).any(axis=1)
    live_mask = phi.mask | ~safe_mask
    safe = TemporalProperty(universe, safe_mask, f"safe({phi.name})")
    live = TemporalProperty(universe, live_mask, f"live({phi.name})")
    return Decomposition(
        safe,
        live,
        is_safety(universe, safe).holds,
        is_liveness(universe, live).holds,
        bool(np.array_equal(safe_mask & live_mask, phi.mask)),
    )


def property_requirement(universe, phi):
    """Systems all of whose behaviors lie in ``phi``."""
    _check_prop(universe, phi)
    model = universe.model
    onehot = np.zeros(model.size, dtype=np.bool_)
    onehot[phi.bits] = True
    return Requirement(model, model.down(onehot), f"R[{phi.name}]")


def symbol_obligation(universe, symbol):
    """Systems exhibiting at least one behavior in which ``symbol`` occurs."""
    hits = [i for i, b in enumerate(universe.behaviors) if b.contains(symbol)]
    model = universe.model
    m = np.arange(model.size, dtype=np.int64)
    sel = sum(1 << i for i in hits)
    return Requirement(model, (m & sel) != 0, f"R_{symbol}")


def _obs_label(words):
    return "{" + ",".join(_word_label(w) for w in words) + "}"


def tstar_setup(universe, set_cap=DEFAULT_SET_CAP, max_observations=MAX_TSTAR_OBSERVATIONS):
    """Observations are finite sets (size <= ``set_cap``) of words up to the
    universe's prefix depth; a system yields every such set made of
    prefixes of its behaviors."""
    key = (set_cap, max_observations)
    if key in universe._tstar:
        return universe._tstar[key]
    nw = len(universe.words)
    combos = [c for r in range(set_cap + 1) for c in combinations(range(nw), r)]
    model = universe.model
    if len(combos) > max_observations or len(combos) * model.size > MAX_ALPHA_CELLS:
        raise ObservationSpaceTooLarge(
            f"T_* over {universe.label} with set size <= {set_cap} has {len(combos)} observations"
        )
    obs_sets = np.zeros((len(combos), nw), dtype=np.bool_)
    for t, c in enumerate(combos):
        obs_sets[t, list(c)] = True
    m = np.arange(model.size, dtype=np.int64)
    sys_bits = ((m[:, None] >> np.arange(model.nbits, dtype=np.int64)) & 1).astype(np.int32)
    sys_sets = (sys_bits @ universe.prefix_matrix.astype(np.int32)) > 0
    alpha = kernels.subset_alpha(np.ascontiguousarray(sys_sets), obs_sets)
    labels = [_obs_label([universe.words[i] for i in c]) for c in combos]
    setup = setup_from_matrix(model, labels, alpha, name="t_star", validate=False)
    universe._tstar[key] = setup
    return setup


def is_hyper_safety(universe, R, set_cap=DEFAULT_SET_CAP):
    check_model(universe.model, R)
    return is_refutable(tstar_setup(universe, set_cap), R).holds
