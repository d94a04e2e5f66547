"""Finite bounded posets, requirements over them, and requirement types.

A :class:`SystemModel` is an explicit finite poset with designated least
and greatest elements.  Two storage layouts are supported:

* an explicit model keeps the reflexive-transitive closure of the order
  as a boolean matrix, elements sorted lexicographically by identifier;
* a powerset model (``nbits`` atoms) indexes element ``m`` by the bitmask
  ``m`` and orders by subset inclusion, so ``leq`` is a bit test and no
  matrix is stored.  This is what the input-output and temporal
  universes use, where ``2**16`` elements would make a dense matrix
  impractical.

Requirements are extensional: a boolean membership mask over the model's
element indices.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import BoundViolation, CycleDetected, ModelMismatch, UnknownElement

__all__ = [
    "SystemModel",
    "Requirement",
    "Classification",
    "build_model",
    "powerset_model",
    "requirement",
    "up_closure",
    "down_closure",
    "classify",
    "combine",
    "meet",
    "join",
]

# dense leq matrices are only materialised for powerset models up to this size
_DENSE_POWERSET_LIMIT = 1 << 12


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=np.bool_)
    a.setflags(write=False)
    return a


class SystemModel:
    """Bounded poset of systems.  Build with :func:`build_model` or
    :func:`powerset_model` rather than calling the constructor."""

    def __init__(self, elements, bot, top, leq=None, nbits=None, atoms=None):
        self.elements = tuple(elements)
        self._index = {e: i for i, e in enumerate(self.elements)}
        self.nbits = nbits
        self.atoms = tuple(atoms) if atoms is not None else None
        self._leq = _frozen(leq) if leq is not None else None
        self.bot = bot
        self.top = top

    @property
    def is_powerset(self):
        return self.nbits is not None

    @property
    def size(self):
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, e):
        return e in self._index

    def __repr__(self):
        kind = f"powerset of {self.nbits} atoms" if self.is_powerset else "explicit"
        return f"<SystemModel {kind}, {self.size} elements>"

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, SystemModel):
            return NotImplemented
        if self.elements != other.elements or (self.bot, self.top) != (other.bot, other.top):
            return False
        if self.is_powerset and other.is_powerset:
            return self.nbits == other.nbits
        return np.array_equal(self.leq_matrix, other.leq_matrix)

    def __hash__(self):
        return hash((self.elements[:8], len(self.elements), self.bot, self.top))

    def index(self, e):
        try:
            return self._index[e]
        except KeyError:
            raise UnknownElement(e) from None

    def leq(self, a, b):
        i, j = self.index(a), self.index(b)
        if self.is_powerset:
            return i & ~j == 0
        return bool(self._leq[i, j])

    @property
    def leq_matrix(self):
        """Dense reflexive-transitive order matrix, ``leq[i, j]`` iff i <= j."""
        if self._leq is None:
            if self.size > _DENSE_POWERSET_LIMIT:
                raise MemoryError(f"refusing to materialise a {self.size}^2 order matrix")
            m = np.arange(self.size)
            self._leq = _frozen((m[:, None] & ~m[None, :]) == 0)
        return self._leq

    def mask(self, members):
        out = np.zeros(self.size, dtype=np.bool_)
        for e in members:
            out[self.index(e)] = True
        return out

    def up(self, mask):
        if self.is_powerset:
            return kernels.up_closure_pow(mask, self.nbits)
        return kernels.up_closure_rel(self._leq, mask)

    def down(self, mask):
        if self.is_powerset:
            return kernels.down_closure_pow(mask, self.nbits)
        return kernels.down_closure_rel(self._leq, mask)

    def sort_key(self, i):
        return self.elements[i]

    def ids(self, mask):
        """Identifiers selected by ``mask``, in lexicographic order."""
        return sorted(self.elements[i] for i in np.flatnonzero(mask))

    def all(self, name="all"):
        return Requirement(self, np.ones(self.size, dtype=np.bool_), name)

    def none(self, name="none"):
        return Requirement(self, np.zeros(self.size, dtype=np.bool_), name)


class Requirement:
    """A named set of systems of one model.  Also used for assumptions."""

    __slots__ = ("model", "mask", "name")

    def __init__(self, model, mask, name=""):
        mask = _frozen(mask)
        if mask.shape != (model.size,):
            raise ModelMismatch(f"mask of shape {mask.shape} for a model of {model.size} elements")
        self.model = model
        self.mask = mask
        self.name = name

    @property
    def members(self):
        return frozenset(self.model.elements[i] for i in np.flatnonzero(self.mask))

    def sorted_members(self):
        return self.model.ids(self.mask)

    def __contains__(self, e):
        return bool(self.mask[self.model.index(e)])

    def __len__(self):
        return int(self.mask.sum())

    def __iter__(self):
        return iter(self.sorted_members())

    def __eq__(self, other):
        if not isinstance(other, Requirement):
            return NotImplemented
        return _same_model(self.model, other.model) and np.array_equal(self.mask, other.mask)

    def __hash__(self):
        return hash((self.model.size, self.mask.tobytes()))

    def __repr__(self):
        n = len(self)
        shown = self.sorted_members() if n <= 6 else f"{n} systems"
        return f"Requirement({self.name!r}, {shown})"

    def renamed(self, name):
        return Requirement(self.model, self.mask, name)

    def chi(self, e):
        """Characteristic function: 1 if ``e`` satisfies the requirement."""
        return int(e in self)

    @property
    def is_trivial(self):
        return bool(self.mask.all() or not self.mask.any())


@dataclass(frozen=True)
class Classification:
    is_obligation: bool
    is_prohibition: bool
    is_trivial: bool
    is_semi_monotone: bool

    def flags(self):
        return {
            "obligation": self.is_obligation,
            "prohibition": self.is_prohibition,
            "trivial": self.is_trivial,
            "semi_monotone": self.is_semi_monotone,
        }


def _same_model(a, b):
    return a is b or a == b


def check_model(model, *reqs):
    for r in reqs:
        if not _same_model(model, r.model):
            raise ModelMismatch(f"requirement {r.name!r} belongs to a different model")


def build_model(elements, order_pairs, bot, top):
    """Build an explicit bounded poset.

    ``order_pairs`` need not be closed; the reflexive-transitive closure
    is taken here.  Raises :class:`UnknownElement`, :class:`CycleDetected`
    or :class:`BoundViolation`.
    """
    elems = sorted(set(elements))
    index = {e: i for i, e in enumerate(elems)}
    for e in (bot, top):
        if e not in index:
            raise UnknownElement(e)
    n = len(elems)
    adj = np.eye(n, dtype=np.bool_)
    for a, b in order_pairs:
        if a not in index:
            raise UnknownElement(a)
        if b not in index:
            raise UnknownElement(b)
        adj[index[a], index[b]] = True
    leq = kernels.transitive_closure(adj)
    both = leq & leq.T
    np.fill_diagonal(both, False)
    if both.any():
        i, j = np.argwhere(both)[0]
        raise CycleDetected(elems[i], elems[j])
    b, t = index[bot], index[top]
    if not leq[b].all():
        raise BoundViolation("bot", bot, elems[int(np.flatnonzero(~leq[b])[0])])
    if not leq[:, t].all():
        raise BoundViolation("top", top, elems[int(np.flatnonzero(~leq[:, t])[0])])
    return SystemModel(elems, bot, top, leq=leq)


def _set_label(atoms):
    return "{" + ",".join(atoms) + "}"


def powerset_model(atoms):
    """The lattice of all subsets of ``atoms`` ordered by inclusion.

    Element ``m`` is the subset whose bits are set in ``m``; its
    identifier lists the atoms in bit order, e.g. ``{(0,0),(1,0)}``.
    """
    atoms = tuple(atoms)
    nbits = len(atoms)
    elements = [
        _set_label([atoms[b] for b in range(nbits) if m >> b & 1]) for m in range(1 << nbits)
    ]
    return SystemModel(elements, elements[0], elements[-1], nbits=nbits, atoms=atoms)


def requirement(model, members, name=""):
    return Requirement(model, model.mask(members), name)


def up_closure(model, R):
    """All systems abstracting some member of ``R``."""
    check_model(model, R)
    return Requirement(model, model.up(R.mask), f"up({R.name})")


def down_closure(model, R):
    """All systems refining some member of ``R``."""
    check_model(model, R)
    return Requirement(model, model.down(R.mask), f"down({R.name})")


def classify(model, R):
    check_model(model, R)
    mask = R.mask
    up = model.up(mask)
    down = model.down(mask)
    return Classification(
        is_obligation=bool(np.array_equal(up, mask)),
        is_prohibition=bool(np.array_equal(down, mask)),
        is_trivial=R.is_trivial,
        is_semi_monotone=bool(np.array_equal(up & down, mask)),
    )


def combine(op, R1, R2):
    check_model(R1.model, R2)
    if op == "meet":
        return Requirement(R1.model, R1.mask & R2.mask, f"({R1.name} & {R2.name})")
    if op == "join":
        return Requirement(R1.model, R1.mask | R2.mask, f"({R1.name} | {R2.name})")
    raise ValueError(f"unknown operation {op!r}; expected 'meet' or 'join'")


def meet(R1, R2):
    return combine("meet", R1, R2)


def join(R1, R2):
    return combine("join", R1, R2)
