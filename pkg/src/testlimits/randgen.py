"""Random bounded posets, setups and requirements for property drivers.

Every function takes a ``numpy.random.Generator`` so runs are
reproducible from a single seed.
"""
import numpy as np

from .order import Requirement, build_model
from .testsetup import reflexive_setup, setup_from_matrix

__all__ = ["random_model", "random_mask", "random_requirement", "random_setup", "instances"]

DEFAULT_SEED = 20240611


def random_model(rng, max_size=8, min_size=2, density=None):
    """Bounded poset with ``bot``, ``top`` and up to ``max_size - 2`` middle elements."""
    n = int(rng.integers(min_size, max_size + 1))
    middle = [f"m{i}" for i in range(n - 2)]
    p = rng.uniform(0.1, 0.6) if density is None else density
    perm = rng.permutation(len(middle))
    pairs = []
    for a in range(len(middle)):
        for b in range(a + 1, len(middle)):
            if rng.random() < p:
                pairs.append((middle[perm[a]], middle[perm[b]]))
    pairs += [("bot", m) for m in middle] + [(m, "top") for m in middle] + [("bot", "top")]
    return build_model(["bot", "top", *middle], pairs, "bot", "top")


def random_mask(rng, model):
    """Uniform subset, or the up or down closure of one, in equal shares."""
    mask = rng.random(model.size) < rng.uniform(0.1, 0.9)
    kind = int(rng.integers(3))
    if kind == 1:
        mask = model.up(mask)
    elif kind == 2:
        mask = model.down(mask)
    return mask


def random_requirement(rng, model, name="R"):
    return Requirement(model, random_mask(rng, model), name)


def random_setup(rng, model, max_observations=6, reflexive_share=0.15):
    """Order-preserving setup: each ``alpha_hat(t)`` is drawn as an up-set."""
    if rng.random() < reflexive_share:
        return reflexive_setup(model)
    k = int(rng.integers(1, max_observations + 1))
    cols = []
    for _ in range(k):
        seed = rng.random(model.size) < rng.uniform(0.05, 0.5)
        cols.append(model.up(seed))
    alpha = np.stack(cols, axis=1)
    return setup_from_matrix(model, [f"t{i}" for i in range(k)], alpha, name="random")


def instances(seed=DEFAULT_SEED, count=100, max_size=8):
    """Yield ``(model, setup, R)`` triples."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        model = random_model(rng, max_size)
        yield model, random_setup(rng, model), random_requirement(rng, model)
