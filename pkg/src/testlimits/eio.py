"""The bounded extensional input-output model and the T_k setups.

A system is a set of (input, output) pairs.  The unbounded model over
pairs of naturals is truncated to the grid ``0..B-1 x 0..B-1``; every
subset of the grid is a system and systems are ordered by inclusion.
Pair ``(i, o)`` is atom ``i * B + o`` of the underlying powerset model,
so a system's element index is its bitmask.
"""
from dataclasses import dataclass
from itertools import product

import numpy as np

from . import kernels
from .errors import BoundTooLarge, BoundTooSmallForChain, ObservationSpaceTooLarge, UnknownRequirementName
from .order import Requirement, meet, powerset_model
from .testsetup import setup_from_matrix

__all__ = [
    "EioUniverse",
    "EioSystem",
    "build_universe",
    "tk_setup",
    "builtin_requirement",
    "BUILTIN_NAMES",
    "exhibits",
    "never_exhibits",
    "zigzag_chain",
    "chain_example",
    "PREDICATES",
]

MAX_BOUND = 4
MAX_OBSERVATIONS = 4096
MAX_ALPHA_CELLS = 1 << 26


def _pair_label(p):
    return f"({p[0]},{p[1]})"


@dataclass(frozen=True)
class EioSystem:
    pairs: frozenset

    @classmethod
    def of(cls, pairs):
        return cls(frozenset((int(i), int(o)) for i, o in pairs))

    def __iter__(self):
        return iter(sorted(self.pairs))

    def __len__(self):
        return len(self.pairs)

    def union(self, pairs):
        return EioSystem(self.pairs | frozenset(pairs))

    def outputs(self, i):
        return {o for (j, o) in self.pairs if j == i}

    @property
    def label(self):
        return "{" + ",".join(_pair_label(p) for p in sorted(self.pairs)) + "}"

    def __str__(self):
        return self.label


class EioUniverse:
    """All subsets of the ``bound x bound`` grid, ordered by inclusion."""

    def __init__(self, bound):
        self.bound = bound
        self.pairs = [(i, o) for i in range(bound) for o in range(bound)]
        self.model = powerset_model([_pair_label(p) for p in self.pairs])
        self._bits = None

    def __repr__(self):
        return f"<EioUniverse bound={self.bound}: {self.model.size} systems>"

    @property
    def label(self):
        return f"eio(bound={self.bound})"

    def pair_bit(self, i, o):
        if not (0 <= i < self.bound and 0 <= o < self.bound):
            raise BoundTooSmallForChain(f"pair ({i},{o}) lies outside the {self.bound}x{self.bound} grid")
        return i * self.bound + o

    def index(self, system):
        pairs = system.pairs if isinstance(system, EioSystem) else system
        m = 0
        for i, o in pairs:
            m |= 1 << self.pair_bit(i, o)
        return m

    def element(self, system):
        return self.model.elements[self.index(system)]

    def system(self, index):
        return EioSystem(frozenset(p for b, p in enumerate(self.pairs) if index >> b & 1))

    def systems(self):
        for m in range(self.model.size):
            yield self.system(m)

    @property
    def grid(self):
        """Boolean array ``[system, input, output]``."""
        if self._bits is None:
            m = np.arange(self.model.size, dtype=np.int64)
            bits = (m[:, None] >> np.arange(len(self.pairs), dtype=np.int64)) & 1
            self._bits = bits.astype(np.bool_).reshape(-1, self.bound, self.bound)
            self._bits.setflags(write=False)
        return self._bits

    def requirement(self, mask, name):
        return Requirement(self.model, mask, name)


def build_universe(bound, cap=MAX_BOUND):
    if bound < 1:
        raise ValueError("bound must be at least 1")
    if bound > cap:
        raise BoundTooLarge(f"bound {bound} exceeds cap {cap} (2^{bound * bound} systems)")
    return EioUniverse(bound)


def _tuple_label(tup):
    if len(tup) == 1:
        return "{" + _pair_label(tup[0]) + "}"
    return "(" + ",".join(_pair_label(p) for p in tup) + ")"


def tk_setup(universe, k, max_observations=MAX_OBSERVATIONS):
    """Setup observing ``k`` input-output pairs: ``alpha_k(S) = S^k``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    n_pairs = len(universe.pairs)
    n_obs = n_pairs**k
    if n_obs > max_observations or n_obs * universe.model.size > MAX_ALPHA_CELLS:
        raise ObservationSpaceTooLarge(f"T_{k} over bound {universe.bound} has {n_obs} observations")
    tuples = np.array(list(product(range(n_pairs), repeat=k)), dtype=np.int64).reshape(n_obs, k)
    alpha = kernels.power_alpha(n_pairs, tuples)
    labels = [_tuple_label([universe.pairs[b] for b in row]) for row in tuples]
    return setup_from_matrix(universe.model, labels, alpha, name=f"t{k}", validate=False)


# Per-system predicates.  These are the reference definitions; the
# vectorised versions in ``_MASKS`` must agree with them.


def is_deterministic(pairs, bound=None):
    seen = {}
    for i, o in pairs:
        if seen.setdefault(i, o) != o:
            return False
    return True


def is_total(pairs, bound):
    return all(any(j == i for j, _ in pairs) for i in range(bound))


def is_total_function(pairs, bound):
    return is_deterministic(pairs) and is_total(pairs, bound)


def is_anonymous(pairs, bound=None):
    pairs = set(pairs)
    return all(any(j != i and q == o for j, q in pairs) for i, o in pairs)


def never_zero_on_odd(pairs, bound=None):
    return not any(i % 2 == 1 and o == 0 for i, o in pairs)


PREDICATES = {
    "determinism": is_deterministic,
    "totality": is_total,
    "total_function": is_total_function,
    "anonymity_zigzag": is_anonymous,
    "never_zero_odd": never_zero_on_odd,
}


def _determinism(g):
    return (g.sum(axis=2) <= 1).all(axis=1)


def _totality(g):
    return g.any(axis=2).all(axis=1)


def _anonymity(g):
    return (g.sum(axis=1) != 1).all(axis=1)


def _never_zero_odd(g):
    return ~g[:, 1::2, 0].any(axis=1)


_MASKS = {
    "determinism": _determinism,
    "totality": _totality,
    "anonymity_zigzag": _anonymity,
    "never_zero_odd": _never_zero_odd,
}

BUILTIN_NAMES = tuple(PREDICATES)


def builtin_requirement(universe, name):
    if name == "total_function":
        return meet(
            builtin_requirement(universe, "determinism"), builtin_requirement(universe, "totality")
        ).renamed("total_function")
    try:
        fn = _MASKS[name]
    except KeyError:
        raise UnknownRequirementName(
            f"unknown requirement {name!r}; expected one of {', '.join(BUILTIN_NAMES)}"
        ) from None
    return universe.requirement(fn(universe.grid), name)


def exhibits(universe, pair, name=None):
    """Obligation: the system contains ``pair``."""
    i, o = pair
    mask = universe.grid[:, i, o].copy()
    return universe.requirement(mask, name or f"exhibits{_pair_label(pair)}")


def never_exhibits(universe, pairs, name=None):
    """Prohibition: the system contains none of ``pairs``."""
    g = universe.grid
    mask = np.ones(universe.model.size, dtype=np.bool_)
    for i, o in pairs:
        if 0 <= i < universe.bound and 0 <= o < universe.bound:
            mask &= ~g[:, i, o]
    return universe.requirement(mask, name or "never_exhibits")


def zigzag_chain(n):
    """First ``n`` systems of the ascending chain S_0 <= S_1 <= ...

    S_0 = {(0,0)} and S_j adds (j, j // 2), which is j/2 for even j and
    (j-1)/2 for odd j.
    """
    chain = []
    s = EioSystem.of([(0, 0)])
    for j in range(n):
        if j:
            s = s.union([(j, j // 2)])
        chain.append(s)
    return chain


def chain_example(universe, n=None):
    """The chain truncated to what fits in ``universe``'s grid."""
    fits = universe.bound
    if n is None:
        n = fits
    if n > fits:
        raise BoundTooSmallForChain(
            f"bound {universe.bound} hosts {fits} chain elements, {n} requested"
        )
    return zigzag_chain(n)
