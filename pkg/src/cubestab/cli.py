"""Command-line front end.

Exit status: 0 all checked properties hold, 1 a property failed (witnesses
in the report), 2 usage or parse error, 3 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from . import coxeter, deligne, graphprod, median, stabposet

log = logging.getLogger("cubestab")
log.addHandler(logging.NullHandler())

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

COMMANDS = {
    "coxeter": ["check"],
    "davis": ["build"],
    "verify": ["star", "disjoint-star", "heights", "fix-lemma", "chains"],
    "deligne": ["domain", "free-ball", "formal-star"],
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: Path
    radius: int = 3
    margin: int = 2
    cap_vertices: int = graphprod.DEFAULT_VERTEX_CAP
    max_generators: int = coxeter.MAX_GENERATORS
    format: str = "json"
    output: Path | None = None
    quiet: bool = False
    full: bool = False

    def __post_init__(self):
        if self.radius < 1 or self.margin < 1:
            raise UsageError("--radius and --margin must be at least 1")
        if self.cap_vertices < 1 or self.max_generators < 1:
            raise UsageError("caps must be positive")
        if self.format not in ("json", "dot", "text"):
            raise UsageError(f"unknown format {self.format!r}")


class _JsonLogFormatter(logging.Formatter):
    def format(self, record):
        return json.dumps({"level": record.levelname, "msg": record.getMessage()}, sort_keys=True)


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON: {exc}") from None


def _load_action(cfg: RunConfig):
    """Graph-product input gives a Davis ball; a cube listing with generators gives a permutation action."""
    data = _load_json(cfg.input)
    if isinstance(data, dict) and "cubes" in data and "generators" in data:
        try:
            return stabposet.PermutationAction.from_json(data), {"kind": "permutation action"}
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"{cfg.input}: {exc}") from None
    try:
        sys_ = graphprod.parse_graph_product(data)
    except graphprod.GraphProductError as exc:
        raise UsageError(f"{cfg.input}: {exc}") from None
    ball = graphprod.build_davis_ball(sys_, cfg.radius, cfg.margin, cfg.cap_vertices)
    meta = {"kind": "davis ball", "radius": cfg.radius, "margin": cfg.margin}
    return ball, meta


def _load_coxeter(cfg: RunConfig):
    try:
        sys_ = coxeter.parse_coxeter(Path(cfg.input).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {cfg.input}: {exc.strerror}") from None
    except coxeter.CoxeterParseError as exc:
        raise UsageError(f"{cfg.input}: {exc}") from None
    if len(sys_.generators) > cfg.max_generators:
        raise UsageError(
            f"{len(sys_.generators)} generators exceeds the soft limit {cfg.max_generators} (--max-generators)"
        )
    return sys_


def _summary_line(name, holds, **counts):
    bits = " ".join(f"{k}={v}" for k, v in counts.items())
    return f"{name}: {'OK' if holds else 'FAIL'} {bits}".rstrip()


def _coxeter_check(cfg):
    sys_ = _load_coxeter(cfg)
    ok, witness = coxeter.is_fc(sys_)
    poset = coxeter.spherical_subsets(sys_)
    report = {
        "generators": list(sys_.generators),
        "spherical": coxeter.is_spherical(sys_, sys_.generators),
        "types": coxeter.classify(sys_, sys_.generators),
        "fc": ok,
        "witness": None if witness is None else list(witness),
        "spherical_subsets": [sys_.sort(s) for s in poset.subsets],
    }
    text = "spherical" if report["spherical"] else "not spherical"
    text += ", FC" if ok else f", not FC (witness {{{','.join(witness)}}})"
    return EXIT_OK, report, text


def _davis_build(cfg):
    action, meta = _load_action(cfg)
    if not isinstance(action, graphprod.EquivariantBall):
        raise UsageError("davis build needs a graph-product input")
    cx = action.complex
    flag, bad = median.check_flag_links(cx, [v for v in cx.vertices if v in action.core])
    report = {**meta, "ball": action.to_json(), "flag_links_at_core": flag,
              "flag_violation": None if bad is None else action.vertex_label(bad)}
    if cfg.format == "dot":
        return EXIT_OK if flag else EXIT_VIOLATION, median.to_dot(cx, action.vertex_label, "davis"), None
    text = (f"davis ball: {len(cx.vertices)} vertices, {len(cx)} cubes, dim {cx.dim}, "
            f"{len(action.interior)} interior; flag links {'OK' if flag else 'FAIL'}")
    return EXIT_OK if flag else EXIT_VIOLATION, report, text


def _verify(cfg, which):
    action, meta = _load_action(cfg)
    report = dict(meta, dim=action.complex.dim)
    if which == "star":
        r = stabposet.check_property_star(action)
        report["star"] = r.to_json(action, full=cfg.full)
        text = _summary_line("property (*)", r.ok, pairs=r.checked_pairs, violations=len(r.violations))
        return (EXIT_OK if r.ok else EXIT_VIOLATION), report, text
    if which == "disjoint-star":
        r = stabposet.check_disjoint_star(action)
        report["disjoint_star"] = r.to_json(action, full=cfg.full)
        text = _summary_line("disjoint (*)", r.ok, pairs=r.checked_pairs, skipped=r.skipped,
                             disagreements=len(r.disagreements))
        return (EXIT_OK if r.ok else EXIT_VIOLATION), report, text
    star_ok = stabposet.check_property_star(action).ok
    report["star_holds"] = star_ok
    if which == "heights":
        p = stabposet.stabiliser_poset(action)
        report["stabiliser_poset"] = p.to_json(action)
        ok = p.within_bound or not star_ok
        text = _summary_line("stabiliser poset", ok, height=p.height, bound=p.dim + 1)
        return (EXIT_OK if ok else EXIT_VIOLATION), report, text
    if not hasattr(action, "act_vertex"):
        raise UsageError(f"verify {which} needs a finite action")
    if which == "fix-lemma":
        r = stabposet.check_fix_lemma(action)
        report["fix_lemma"] = r.to_json(action)
        ok = r.ok or not star_ok
        text = _summary_line("Fix(H) = Fix(P_H)", ok, subgroups=r.checked, failures=len(r.failures))
        return (EXIT_OK if ok else EXIT_VIOLATION), report, text
    r = stabposet.chain_condition_demo(action)
    report["chains"] = r.to_json()
    ok = r.ok or not star_ok
    text = _summary_line("fixed-set poset", ok, height=r.height, bound=r.dim + 1)
    return (EXIT_OK if ok else EXIT_VIOLATION), report, text


def _deligne(cfg, which):
    sys_ = _load_coxeter(cfg)
    if which == "domain":
        try:
            dom = deligne.build_fundamental_domain(sys_)
        except deligne.NotFCError as exc:
            raise UsageError(str(exc)) from None
        report = dom.to_json()
        report["standard_label_height"] = deligne.standard_label_height(dom)
        return EXIT_OK, report, f"fundamental domain: {len(dom.cubes)} cubes, dim {dom.dim}"
    if which == "free-ball":
        try:
            ball = deligne.build_deligne_ball_free(sys_, cfg.radius)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        flag, bad = median.check_flag_links(ball.complex)
        star = stabposet.check_property_star(ball)
        ok = flag and star.ok
        if cfg.format == "dot":
            return (EXIT_OK if ok else EXIT_VIOLATION), median.to_dot(ball.complex, ball.vertex_label, "deligne"), None
        report = {
            "ball": ball.to_json(),
            "flag_links": flag,
            "flag_violation": None if bad is None else ball.vertex_label(bad),
            "star": star.to_json(ball, full=cfg.full),
        }
        text = _summary_line("deligne free ball", ok, vertices=len(ball.complex.vertices),
                             pairs=star.checked_pairs, violations=len(star.violations))
        return (EXIT_OK if ok else EXIT_VIOLATION), report, text
    # formal-star
    if sys_.is_free():
        ball = deligne.build_deligne_ball_free(sys_, cfg.radius)
        r = deligne.free_formal_star(ball)
        oracle = "free product"
    else:
        try:
            dom = deligne.build_fundamental_domain(sys_)
        except deligne.NotFCError as exc:
            raise UsageError(str(exc)) from None
        r = deligne.formal_property_star(sys_, deligne.StandardParabolicOracle(), deligne.domain_sample(dom))
        oracle = "standard parabolic (identity conjugator)"
    report = r.to_json()
    if not cfg.full:
        report.pop("entries")
    report["oracle"] = oracle
    text = _summary_line("formal (*)", r.ok, samples=len(r.entries), violations=len(r.violations))
    return (EXIT_OK if r.ok else EXIT_VIOLATION), report, text


def run(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    group, _, which = cfg.command.partition(" ")
    try:
        if group == "coxeter":
            status, report, text = _coxeter_check(cfg)
        elif group == "davis":
            status, report, text = _davis_build(cfg)
        elif group == "verify":
            status, report, text = _verify(cfg, which)
        elif group == "deligne":
            status, report, text = _deligne(cfg, which)
        else:
            raise UsageError(f"unknown command {cfg.command!r}")
    except UsageError as exc:
        log.error(str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except graphprod.ResourceCapExceeded as exc:
        log.error(str(exc))
        print(f"error: resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    if isinstance(report, str):
        payload = report
    elif cfg.format == "text" and text:
        payload = text + "\n"
    else:
        report = {"command": cfg.command, "status": status, "report": report}
        payload = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if cfg.output is not None:
        Path(cfg.output).write_text(payload)
    if cfg.quiet:
        if text:
            print(text, file=stdout)
    elif cfg.output is None:
        stdout.write(payload)
    log.info(json.dumps({"command": cfg.command, "status": status}))
    return status


def build_parser():
    parser = argparse.ArgumentParser(prog="cubestab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="JSON log lines on stderr")
    groups = parser.add_subparsers(dest="group", required=True)
    for group, subs in COMMANDS.items():
        gp = groups.add_parser(group)
        sp = gp.add_subparsers(dest="which", required=True)
        for which in subs:
            p = sp.add_parser(which)
            p.add_argument("input", type=Path)
            p.add_argument("--radius", type=int, default=3)
            p.add_argument("--margin", type=int, default=2)
            p.add_argument("--cap-vertices", type=int, default=graphprod.DEFAULT_VERTEX_CAP)
            p.add_argument("--max-generators", type=int, default=coxeter.MAX_GENERATORS)
            p.add_argument("--format", choices=["json", "dot", "text"], default="json")
            p.add_argument("--output", type=Path)
            p.add_argument("--quiet", action="store_true", help="print a one-line summary only")
            p.add_argument("--full", action="store_true", help="embed every witness, not just failures")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_JsonLogFormatter())
    log.handlers[:] = [handler]
    log.setLevel(logging.INFO if args.verbose else logging.CRITICAL)
    try:
        cfg = RunConfig(
            command=f"{args.group} {args.which}",
            input=args.input,
            radius=args.radius,
            margin=args.margin,
            cap_vertices=args.cap_vertices,
            max_generators=args.max_generators,
            format=args.format,
            output=args.output,
            quiet=args.quiet,
            full=args.full,
        )
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
