"""Command-line front end.

Every command prints a few human-readable lines starting with ``#``
followed by machine-readable ``key=value`` lines.  The exit status is
derived from the ``verdict`` key alone: 0 affirmative, 1 negative,
3 inconclusive; usage and validation errors exit with 2.
"""
import argparse
import sys

import numpy as np

from . import __version__
from .algorithmic import NAMED_OMEGAS, algorithm1, omega_set, subprocess_enumerator
from .assumptions import AssumptionContext, reduction_campaign, refutable_under, residual_prohibition
from .errors import WorkbenchError
from .order import classify, down_closure, meet, up_closure
from .randgen import DEFAULT_SEED, random_model, random_requirement, random_setup
from .temporal import decompose, is_hyper_safety, is_liveness, is_safety, nabla
from .testsetup import is_more_permissive, is_refutable, is_verifiable, separating_requirement
from .workbench import dump_spec, eio_spec, load_spec, parse_file, temporal_spec

__all__ = ["main", "run_command", "Report", "exit_code"]

AFFIRMATIVE = {
    "holds",
    "classified",
    "computed",
    "generated",
    "refuted",
    "unconditional",
    "conditional",
    "safety",
    "liveness",
    "hyper-safety",
    "decomposed",
    "more-permissive",
}
NEGATIVE = {"fails", "not-safety", "not-liveness", "not-hyper-safety", "not-decomposed", "not-more-permissive"}
INCONCLUSIVE = {"inconclusive", "budget-exhausted"}


def exit_code(verdict):
    if verdict in AFFIRMATIVE:
        return 0
    if verdict in NEGATIVE:
        return 1
    if verdict in INCONCLUSIVE:
        return 3
    return 2


class Report:
    def __init__(self, verdict, universe=None):
        self.verdict = verdict
        self.notes = []
        self.fields = [("verdict", verdict)]
        if universe is not None:
            self.fields.append(("universe", universe))
        self.raw = None  # printed verbatim instead of the report (gen commands)

    def note(self, text):
        self.notes.append(text)

    def add(self, key, value):
        if isinstance(value, bool):
            value = str(value).lower()
        self.fields.append((key, value))

    def add_many(self, key, values, limit):
        values = list(values)
        for v in values[:limit]:
            self.add(key, v)
        if len(values) > limit:
            self.add(f"{key}_omitted", len(values) - limit)

    @property
    def code(self):
        return exit_code(self.verdict)

    def render(self):
        if self.raw is not None:
            return self.raw
        lines = [f"# {n}" for n in self.notes]
        lines += [f"{k}={v}" for k, v in self.fields]
        return "\n".join(lines) + "\n"


def _bool(b):
    return "true" if b else "false"


# -- subcommand handlers ---------------------------------------------------


def _classify(args):
    wb = parse_file(args.file)
    R = wb.requirement(args.req)
    c = classify(wb.model, R)
    rep = Report("classified", wb.universe_label)
    kinds = [k for k, v in c.flags().items() if v] or ["none of the monotone kinds"]
    rep.note(f"{args.req} ({len(R)} of {wb.model.size} systems): {', '.join(kinds)}")
    rep.add("requirement", args.req)
    rep.add("size", len(R))
    for k, v in c.flags().items():
        rep.add(k, v)
    return rep


def _closure(args):
    wb = parse_file(args.file)
    R = wb.requirement(args.req)
    C = (up_closure if args.dir == "up" else down_closure)(wb.model, R)
    rep = Report("computed", wb.universe_label)
    rep.note(f"{args.dir}-closure of {args.req}: {len(C)} systems (from {len(R)})")
    rep.add("size", len(C))
    rep.add_many("member", C.sorted_members(), args.limit)
    return rep


def _witness_report(rep, report, limit):
    rep.add("witnesses", len(report.witnesses))
    rep.add_many("witness", (f"{s} -> {t}" for s, t in sorted(report.witnesses.items())), limit)
    rep.add("blockers", len(report.blockers))
    rep.add_many("blocker", report.blockers, limit)


def _decider(kind):
    def run(args):
        wb = parse_file(args.file)
        R = wb.requirement(args.req)
        setup = wb.setup(args.setup)
        report = (is_refutable if kind == "refutable" else is_verifiable)(setup, R)
        rep = Report(report.verdict, wb.universe_label)
        word = kind if report.holds else f"not {kind}"
        rep.note(f"{args.req} is {word} in setup {args.setup}")
        if report.blockers:
            what = "violator" if kind == "refutable" else "satisfier"
            rep.note(f"{what} without a witness: {report.blockers[0]}")
        _witness_report(rep, report, args.limit)
        return rep

    return run


def _omega(args):
    wb = parse_file(args.file)
    R = wb.requirement(args.req)
    om = sorted(omega_set(wb.setup(args.setup), R))
    rep = Report("computed", wb.universe_label)
    rep.note(f"{len(om)} observations of {args.setup} are irremediable for {args.req}")
    rep.add("size", len(om))
    rep.add_many("observation", om, args.limit)
    return rep


def _refutable_under(args):
    wb = parse_file(args.file)
    ctx = AssumptionContext(wb.assumption(args.assume), wb.requirement(args.req), wb.setup(args.setup))
    report = refutable_under(ctx)
    rep = Report(report.verdict, wb.universe_label)
    rep.note(
        f"{args.req} is {'' if report.holds else 'not '}refutable in {args.setup} "
        f"under assumption {args.assume}"
    )
    rep.add("assumption", args.assume)
    _witness_report(rep, report, args.limit)
    return rep


def _residual(args):
    wb = parse_file(args.file)
    P = residual_prohibition(wb.model, wb.requirement(args.req), wb.assumption(args.assume))
    rep = Report("computed", wb.universe_label)
    rep.note(f"{P.name}: {len(P)} systems")
    rep.add("assumption", args.assume)
    rep.add("size", len(P))
    rep.add_many("member", P.sorted_members(), args.limit)
    return rep


def _campaign_reduce(args):
    wb = parse_file(args.file)
    R, A = wb.requirement(args.req), wb.assumption(args.assume)
    c = reduction_campaign(wb.model, wb.setup(args.setup), R, A, args.system)
    rep = Report(c.conclusion, wb.universe_label)
    rep.note(c.summary)
    rep.add("system", c.system)
    rep.add("assumption", args.assume)
    rep.add("assumption_status", c.assumption_status)
    if c.refutation_witness is not None:
        rep.add("witness", c.refutation_witness)
    if c.verification_witness is not None:
        rep.add("verification_witness", c.verification_witness)
    return rep


def _parse_inputs(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise WorkbenchError(f"--inputs must be comma-separated integers, got {text!r}") from None


def _campaign(args):
    if args.omega not in NAMED_OMEGAS:
        raise WorkbenchError(f"unknown oracle {args.omega!r}; expected one of {', '.join(NAMED_OMEGAS)}")
    inputs = _parse_inputs(args.inputs)
    enum = subprocess_enumerator(args.cmd, inputs, step_quantum=args.quantum)
    try:
        v = algorithm1(enum, NAMED_OMEGAS[args.omega](), args.budget, log=args.log)
    finally:
        enum.close()
    rep = Report("refuted" if v.refuted else "budget-exhausted", "eio(black-box)")
    if v.refuted:
        rep.note(f"observation {v.witness} is irremediable: the system violates the requirement")
    else:
        rep.note("budget exhausted without a witness; this says nothing about satisfaction")
    if v.witness is not None:
        rep.add("witness", v.witness)
    rep.add("steps", v.steps_used)
    rep.add("budget", args.budget)
    if args.log:
        rep.notes.extend(v.log_lines())
    return rep


def _permissive(args):
    wb = parse_file(args.file)
    s1, s2 = wb.setup(args.setup1), wb.setup(args.setup2)
    holds = is_more_permissive(s1, s2, wb.model, method=args.method)
    rep = Report("more-permissive" if holds else "not-more-permissive", wb.universe_label)
    rep.note(f"{args.setup1} is {'' if holds else 'not '}at least as permissive as {args.setup2}")
    if not holds and args.method == "cover":
        sep = separating_requirement(s1, s2)
        rep.add("witness", sep.name)
        rep.add("separating_size", len(sep))
    return rep


def _gen(spec, out):
    wb = load_spec(spec)
    text = dump_spec(wb)
    rep = Report("generated", wb.universe_label)
    if out in (None, "-"):
        rep.raw = text
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        rep.note(f"wrote {out}")
        rep.add("systems", wb.model.size)
    return rep


def _eio_gen(args):
    return _gen(eio_spec(args.bound), args.out)


def _temporal_gen(args):
    return _gen(temporal_spec(args.alphabet, args.stem, args.loop, args.depth), args.out)


def _temporal_prop_cmd(args):
    wb = parse_file(args.file)
    u = wb.universe
    phi = wb.prop(args.prop)
    rep = None
    if args.tcmd == "safety":
        r = is_safety(u, phi)
        rep = Report(r.verdict, r.universe)
        for b, w in sorted(r.bad_prefixes.items()):
            rep.add("witness", f"{b} -> {w or 'ε'}")
        rep.add_many("offender", r.offenders, args.limit)
    elif args.tcmd == "liveness":
        r = is_liveness(u, phi)
        rep = Report(r.verdict, r.universe)
        if r.stuck_prefix is not None:
            rep.add("witness", r.stuck_prefix or "ε")
    elif args.tcmd == "decompose":
        d = decompose(u, phi)
        rep = Report("decomposed" if d.verified else "not-decomposed", u.label)
        rep.add("safe", "{" + ",".join(d.safe.members) + "}")
        rep.add("live", "{" + ",".join(d.live.members) + "}")
        rep.add("safe_is_safety", d.safe_is_safety)
        rep.add("live_is_liveness", d.live_is_liveness)
        rep.add("meet_is_phi", d.meet_is_phi)
    elif args.tcmd == "nabla":
        words = nabla(u, phi)
        rep = Report("computed", u.label)
        rep.add("size", len(words))
        rep.add_many("word", [w or "ε" for w in words], args.limit)
    rep.note(f"{args.prop} = {{{', '.join(phi.members)}}}")
    rep.note("verdicts are relative to the bounded universe")
    return rep


def _temporal_hyper(args):
    wb = parse_file(args.file)
    R = wb.requirement(args.req)
    holds = is_hyper_safety(wb.universe, R, args.set_cap)
    rep = Report("hyper-safety" if holds else "not-hyper-safety", wb.universe_label)
    rep.note(f"{args.req} is {'' if holds else 'not '}refutable from finitely many finite prefixes")
    rep.add("set_cap", args.set_cap)
    return rep


def _selfcheck(args):
    """Randomized spot check of the core theorems."""
    rng = np.random.default_rng(args.seed)
    bad = {"lemma1": 0, "theorem1": 0, "theorem2": 0, "lemma3": 0, "theorem3": 0}
    for _ in range(args.trials):
        model = random_model(rng, args.max_size)
        setup = random_setup(rng, model)
        R = random_requirement(rng, model)
        R2 = random_requirement(rng, model)
        A = random_requirement(rng, model, "A")
        c = classify(model, R)
        bad["lemma1"] += c.is_obligation and c.is_prohibition and not c.is_trivial
        ref = is_refutable(setup, R).holds
        bad["theorem1"] += ref and not c.is_prohibition
        bad["theorem2"] += is_verifiable(setup, R).holds and not c.is_obligation
        if ref and is_refutable(setup, R2).holds:
            bad["lemma3"] += not is_refutable(setup, meet(R, R2)).holds
        if refutable_under(AssumptionContext(A, R, setup)).holds:
            P = residual_prohibition(model, R, A)
            bad["theorem3"] += bool(((P.mask != R.mask) & A.mask).any())
    total = sum(bad.values())
    rep = Report("holds" if total == 0 else "fails", f"random(max_size={args.max_size})")
    rep.note(f"{args.trials} random instances, {total} violations")
    rep.add("seed", args.seed)
    rep.add("trials", args.trials)
    for k, v in bad.items():
        rep.add(f"violations_{k}", int(v))
    return rep


# -- argument parsing ------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="testlimits", description="Refutability and verifiability workbench")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def cmd(name, fn, help_, file=True, req=False, setup=False, assume=False, parent=None):
        sp = (parent or sub).add_parser(name, help=help_)
        if file:
            sp.add_argument("--file", required=True, help="workbench JSON file")
        if req:
            sp.add_argument("--req", required=True, help="requirement name")
        if setup:
            sp.add_argument("--setup", required=True, help="setup name")
        if assume:
            sp.add_argument("--assume", required=True, help="assumption name")
        sp.add_argument("--limit", type=int, default=20, help="max list lines per key (default 20)")
        sp.set_defaults(func=fn)
        return sp

    cmd("classify", _classify, "obligation / prohibition / semi-monotone flags", req=True)
    sp = cmd("closure", _closure, "up- or down-closure of a requirement", req=True)
    sp.add_argument("--dir", choices=["up", "down"], default="up")
    cmd("refutable", _decider("refutable"), "is the requirement refutable in the setup", req=True, setup=True)
    cmd("verifiable", _decider("verifiable"), "is the requirement verifiable in the setup", req=True, setup=True)
    cmd("omega", _omega, "irremediable observations of a requirement", req=True, setup=True)
    cmd("refutable-under", _refutable_under, "refutability under an assumption", req=True, setup=True, assume=True)
    cmd("residual", _residual, "residual prohibition of a requirement under an assumption", req=True, assume=True)
    sp = cmd("campaign-reduce", _campaign_reduce, "refute the residual, then verify the assumption",
             req=True, setup=True, assume=True)
    sp.add_argument("--system", required=True, help="system under test (element id)")

    sp = cmd("campaign", _campaign, "black-box refutation campaign against a subprocess", file=False)
    sp.add_argument("--cmd", required=True, help="command line of the system under test")
    sp.add_argument("--omega", required=True, help=f"named oracle: {', '.join(NAMED_OMEGAS)}")
    sp.add_argument("--budget", type=int, default=500, help="scheduler ticks (default 500)")
    sp.add_argument("--inputs", default="0,1,2,3", help="input schedule, comma-separated")
    sp.add_argument("--quantum", type=float, default=0.01, help="seconds per subprocess step")
    sp.add_argument("--log", action="store_true", help="print the scheduler log")

    sp = cmd("permissive", _permissive, "is setup1 at least as permissive as setup2")
    sp.add_argument("--setup1", required=True)
    sp.add_argument("--setup2", required=True)
    sp.add_argument("--method", choices=["cover", "enumerate"], default="cover")

    eio = sub.add_parser("eio", help="bounded input-output universes")
    esub = eio.add_subparsers(dest="ecmd", required=True)
    sp = cmd("gen", _eio_gen, "emit a workbench file", file=False, parent=esub)
    sp.add_argument("--bound", type=int, default=2)
    sp.add_argument("--out", default="-")

    tmp = sub.add_parser("temporal", help="bounded lasso-word universes")
    tsub = tmp.add_subparsers(dest="tcmd", required=True)
    sp = cmd("gen", _temporal_gen, "emit a workbench file", file=False, parent=tsub)
    sp.add_argument("--alphabet", default="ab")
    sp.add_argument("--stem", type=int, default=1)
    sp.add_argument("--loop", type=int, default=1)
    sp.add_argument("--depth", type=int, default=2)
    sp.add_argument("--out", default="-")
    for name, help_ in (
        ("safety", "is the property a safety property"),
        ("liveness", "is the property a liveness property"),
        ("decompose", "safety / liveness decomposition"),
        ("nabla", "irremediable finite words"),
    ):
        sp = cmd(name, _temporal_prop_cmd, help_, parent=tsub)
        sp.add_argument("--prop", required=True, help="property name")
    sp = cmd("hypersafety", _temporal_hyper, "is the requirement refutable in T_*", req=True, parent=tsub)
    sp.add_argument("--set-cap", type=int, default=3)

    sp = cmd("selfcheck", _selfcheck, "randomized check of the core theorems", file=False)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--max-size", type=int, default=8)
    return p


def run_command(argv):
    """Run one command; returns ``(exit_code, rendered_text)``.

    Errors are rendered as ``error: ...`` with exit code 2.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), ""
    try:
        rep = args.func(args)
    except (WorkbenchError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        return 2, f"error: {msg}\nverdict=error\n"
    return rep.code, rep.render()


def main(argv=None):
    code, text = run_command(sys.argv[1:] if argv is None else argv)
    stream = sys.stderr if code == 2 else sys.stdout
    stream.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
