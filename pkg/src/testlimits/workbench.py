"""Workbench files: a JSON document describing a model, requirements,
setups, assumptions and (for temporal universes) properties.

Builtin universes are stored as generator references, e.g.
``{"generator": "eio", "bound": 2}``, and rebuilt on load.  See the
README for the full grammar.
"""
import json
import re
from dataclasses import dataclass, field

import numpy as np

from . import eio, temporal
from .errors import ParseError, ValidationError, WorkbenchError
from .order import build_model, down_closure, join, meet, requirement, up_closure
from .testsetup import build_setup, reflexive_setup

__all__ = ["Workbench", "parse_file", "parse_text", "load_spec", "dump_spec", "eio_spec", "temporal_spec"]


@dataclass(eq=False)
class Workbench:
    model: object
    universe: object = None
    requirements: dict = field(default_factory=dict)
    assumptions: dict = field(default_factory=dict)
    setups: dict = field(default_factory=dict)
    properties: dict = field(default_factory=dict)
    spec: dict = field(default_factory=dict, repr=False)

    @property
    def universe_label(self):
        return self.universe.label if self.universe is not None else f"explicit({self.model.size})"

    def _lookup(self, table, kind, name):
        try:
            return table[name]
        except KeyError:
            raise ValidationError(f"no {kind} named {name!r}; have {sorted(table)}") from None

    def requirement(self, name):
        return self._lookup(self.requirements, "requirement", name)

    def assumption(self, name):
        if name in self.assumptions:
            return self.assumptions[name]
        return self._lookup(self.requirements, "assumption or requirement", name)

    def setup(self, name):
        return self._lookup(self.setups, "setup", name)

    def prop(self, name):
        return self._lookup(self.properties, "property", name)

    def __eq__(self, other):
        if not isinstance(other, Workbench):
            return NotImplemented
        if self.model != other.model or self.universe_label != other.universe_label:
            return False
        for a, b in ((self.requirements, other.requirements), (self.assumptions, other.assumptions)):
            if a.keys() != b.keys() or any(a[k] != b[k] for k in a):
                return False
        if self.properties.keys() != other.properties.keys():
            return False
        if any(not np.array_equal(self.properties[k].mask, other.properties[k].mask) for k in self.properties):
            return False
        if self.setups.keys() != other.setups.keys():
            return False
        for k, s in self.setups.items():
            o = other.setups[k]
            if s.observations != o.observations or not np.array_equal(s.alpha, o.alpha):
                return False
        return True


class _Located(ValidationError):
    """A validation error that already names its path and line."""


class _Ctx:
    """Carries the source text so validation errors can name a line."""

    def __init__(self, text, source):
        self.text = text or ""
        self.source = source

    def line_of(self, token):
        if token is None:
            return None
        m = re.search(re.escape(json.dumps(token)), self.text)
        return self.text.count("\n", 0, m.start()) + 1 if m else None

    def fail(self, path, msg, token=None):
        line = self.line_of(token)
        where = f"{self.source}: " if self.source else ""
        at = f" (line {line})" if line else ""
        raise _Located(f"{where}{path}: {msg}{at}")


def _model_from(spec, ctx):
    if not isinstance(spec, dict):
        ctx.fail("model", "expected an object")
    gen = spec.get("generator")
    try:
        if gen == "eio":
            u = eio.build_universe(int(spec["bound"]))
            return u.model, u
        if gen == "temporal":
            u = temporal.build_temporal_universe(
                spec["alphabet"],
                int(spec.get("stem_bound", 1)),
                int(spec.get("loop_bound", 1)),
                int(spec.get("prefix_depth", temporal.DEFAULT_DEPTH)),
            )
            return u.model, u
        if gen is not None:
            ctx.fail("model.generator", f"unknown generator {gen!r}", gen)
        for key in ("elements", "bot", "top"):
            if key not in spec:
                ctx.fail("model", f"missing {key!r}")
        pairs = [tuple(p) for p in spec.get("order", [])]
        for k, p in enumerate(pairs):
            if len(p) != 2:
                ctx.fail(f"model.order[{k}]", "expected a pair")
        return build_model(spec["elements"], pairs, spec["bot"], spec["top"]), None
    except KeyError as exc:
        if isinstance(exc, WorkbenchError):
            ctx.fail("model", str(exc), getattr(exc, "element", None))
        ctx.fail("model", f"missing {exc.args[0]!r}")
    except _Located:
        raise
    except ValidationError as exc:
        ctx.fail("model", str(exc), getattr(exc, "element", None))


def _property_from(wb, path, spec, ctx):
    u = wb.universe
    if not isinstance(u, temporal.TemporalUniverse):
        ctx.fail(path, "properties need a temporal model")
    name = path.rsplit(".", 1)[-1]
    if isinstance(spec, list):
        try:
            return temporal.property_from(u, spec, name)
        except _Located:
            raise
        except ValidationError as exc:
            ctx.fail(path, str(exc))
    kind = spec.get("builtin")
    makers = {"never": temporal.never, "eventually": temporal.eventually, "infinitely_often": temporal.infinitely_often}
    if kind not in makers:
        ctx.fail(path, f"unknown property builtin {kind!r}", kind)
    p = makers[kind](u, spec["symbol"])
    return temporal.TemporalProperty(u, p.mask, name)


def _requirement_from(wb, path, name, spec, ctx, pool):
    model = wb.model
    if isinstance(spec, list):
        bad = [e for e in spec if e not in model]
        if bad:
            ctx.fail(path, f"undeclared element {bad[0]!r}", bad[0])
        return requirement(model, spec, name)
    if not isinstance(spec, dict) or len(spec) == 0:
        ctx.fail(path, "expected a member list or a generator object")

    def ref(key):
        n = spec[key]
        if n not in pool:
            ctx.fail(f"{path}.{key}", f"unknown requirement {n!r} (define it earlier)", n)
        return pool[n]

    try:
        if "builtin" in spec:
            if not isinstance(wb.universe, eio.EioUniverse):
                ctx.fail(path, "builtin requirements need an eio model")
            return eio.builtin_requirement(wb.universe, spec["builtin"]).renamed(name)
        if "exhibits" in spec:
            return eio.exhibits(wb.universe, tuple(spec["exhibits"]), name)
        if "never_exhibits" in spec:
            return eio.never_exhibits(wb.universe, [tuple(p) for p in spec["never_exhibits"]], name)
        if "property" in spec:
            return temporal.property_requirement(wb.universe, wb.prop(spec["property"])).renamed(name)
        if "symbol_obligation" in spec:
            return temporal.symbol_obligation(wb.universe, spec["symbol_obligation"]).renamed(name)
        if "meet" in spec or "join" in spec:
            op = "meet" if "meet" in spec else "join"
            parts = spec[op]
            out = None
            for k, n in enumerate(parts):
                if n not in pool:
                    ctx.fail(f"{path}.{op}[{k}]", f"unknown requirement {n!r}", n)
                out = pool[n] if out is None else (meet if op == "meet" else join)(out, pool[n])
            if out is None:
                ctx.fail(path, f"empty {op}")
            return out.renamed(name)
        if "up" in spec:
            return up_closure(model, ref("up")).renamed(name)
        if "down" in spec:
            return down_closure(model, ref("down")).renamed(name)
    except _Located:
        raise
    except ValidationError as exc:
        ctx.fail(path, str(exc))
    ctx.fail(path, f"unknown requirement form {sorted(spec)}")


def _setup_from(wb, path, name, spec, ctx):
    if not isinstance(spec, dict):
        ctx.fail(path, "expected an object")
    kind = spec.get("builtin")
    try:
        if kind == "reflexive":
            s = reflexive_setup(wb.model)
        elif kind == "t_k":
            if not isinstance(wb.universe, eio.EioUniverse):
                ctx.fail(path, "t_k needs an eio model")
            s = eio.tk_setup(wb.universe, int(spec.get("k", 1)))
        elif kind == "t_star":
            if not isinstance(wb.universe, temporal.TemporalUniverse):
                ctx.fail(path, "t_star needs a temporal model")
            s = temporal.tstar_setup(wb.universe, int(spec.get("set_cap", temporal.DEFAULT_SET_CAP)))
        elif kind is not None:
            ctx.fail(f"{path}.builtin", f"unknown setup builtin {kind!r}", kind)
        else:
            obs = spec.get("observations")
            alpha = spec.get("alpha")
            if not isinstance(obs, list) or not isinstance(alpha, dict):
                ctx.fail(path, "custom setups need 'observations' (list) and 'alpha' (object)")
            for e in alpha:
                if e not in wb.model:
                    ctx.fail(f"{path}.alpha", f"undeclared element {e!r}", e)
            s = build_setup(wb.model, obs, alpha, name)
    except _Located:
        raise
    except ValidationError as exc:
        tok = getattr(exc, "observation", None) or (exc.pair[0] if hasattr(exc, "pair") else None)
        ctx.fail(path, str(exc), tok)
    s.name = name
    return s


def load_spec(spec, text=None, source=None):
    """Build a :class:`Workbench` from an already-decoded JSON object."""
    ctx = _Ctx(text, source)
    if not isinstance(spec, dict):
        ctx.fail("$", "top level must be an object")
    unknown = set(spec) - {"model", "requirements", "assumptions", "setups", "properties"}
    if unknown:
        ctx.fail("$", f"unknown sections {sorted(unknown)}", sorted(unknown)[0])
    if "model" not in spec:
        ctx.fail("$", "missing 'model' section")
    model, universe = _model_from(spec["model"], ctx)
    wb = Workbench(model, universe, spec=spec)
    for name, p in spec.get("properties", {}).items():
        wb.properties[name] = _property_from(wb, f"properties.{name}", p, ctx)
    for section, table in (("requirements", wb.requirements), ("assumptions", wb.assumptions)):
        pool = dict(wb.requirements)
        for name, r in spec.get(section, {}).items():
            table[name] = _requirement_from(wb, f"{section}.{name}", name, r, ctx, pool)
            pool[name] = table[name]
    for name, s in spec.get("setups", {}).items():
        wb.setups[name] = _setup_from(wb, f"setups.{name}", name, s, ctx)
    return wb


def parse_text(text, source=None):
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno, source) from None
    return load_spec(spec, text, source)


def parse_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", path=path) from None
    return parse_text(text, str(path))


def dump_spec(wb):
    """JSON text that parses back to an equal workbench."""
    return json.dumps(wb.spec, indent=2, ensure_ascii=False) + "\n"


def eio_spec(bound):
    spec = {
        "model": {"generator": "eio", "bound": bound},
        "requirements": {name: {"builtin": name} for name in eio.BUILTIN_NAMES},
        "setups": {"t1": {"builtin": "t_k", "k": 1}},
    }
    if bound <= 3:
        spec["setups"]["t2"] = {"builtin": "t_k", "k": 2}
        spec["setups"]["reflexive"] = {"builtin": "reflexive"}
    return spec


def temporal_spec(alphabet, stem_bound, loop_bound, prefix_depth):
    alphabet = sorted(set(alphabet))
    props = {}
    reqs = {}
    for a in alphabet:
        props[f"never_{a}"] = {"builtin": "never", "symbol": a}
        props[f"eventually_{a}"] = {"builtin": "eventually", "symbol": a}
        reqs[f"R_never_{a}"] = {"property": f"never_{a}"}
        reqs[f"R_eventually_{a}"] = {"property": f"eventually_{a}"}
        reqs[f"R_{a}"] = {"symbol_obligation": a}
    return {
        "model": {
            "generator": "temporal",
            "alphabet": "".join(alphabet),
            "stem_bound": stem_bound,
            "loop_bound": loop_bound,
            "prefix_depth": prefix_depth,
        },
        "properties": props,
        "requirements": reqs,
        "setups": {"t_star": {"builtin": "t_star"}, "reflexive": {"builtin": "reflexive"}},
    }
