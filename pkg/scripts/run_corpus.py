"""Run every CLI command over the bundled corpus and write one report per run.

    python scripts/run_corpus.py --out runs/ [--radius 3 --margin 2]

Prints a summary table; the exit status is nonzero if any run returned an
unexpected status (the star-violation action is expected to fail).
"""
import argparse
import io
import json
import sys
import tempfile
import time
from pathlib import Path

from cubestab import corpus
from cubestab.cli import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, RunConfig, run

VERIFY = ["star", "disjoint-star", "heights", "fix-lemma", "chains"]


def jobs():
    for name in sorted(corpus.GRAPH_PRODUCTS):
        yield "davis build", f"gp_{name}", EXIT_OK
        for cmd in VERIFY:
            yield f"verify {cmd}", f"gp_{name}", EXIT_OK
    for cmd in ["star", "disjoint-star"]:
        yield f"verify {cmd}", "action_star_violation", EXIT_VIOLATION
    for name in sorted(corpus.COXETER):
        yield "coxeter check", f"coxeter_{name}", EXIT_OK
        fc = name != "triangle333"
        yield "deligne domain", f"coxeter_{name}", EXIT_OK if fc else EXIT_USAGE
        yield "deligne formal-star", f"coxeter_{name}", EXIT_OK if fc else EXIT_USAGE
        if name.startswith("free"):
            yield "deligne free-ball", f"coxeter_{name}", EXIT_OK


def write_inputs(folder: Path):
    files = {f"gp_{k}": v for k, v in corpus.GRAPH_PRODUCTS.items()}
    files.update({f"coxeter_{k}": v for k, v in corpus.COXETER.items()})
    files["action_star_violation"] = corpus.STAR_VIOLATION
    for name, data in files.items():
        (folder / f"{name}.json").write_text(json.dumps(data, sort_keys=True))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, required=True)
    ap.add_argument("--radius", type=int, default=3)
    ap.add_argument("--margin", type=int, default=2)
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    bad = 0
    with tempfile.TemporaryDirectory() as tmp:
        inputs = Path(tmp)
        write_inputs(inputs)
        for command, stem, expected in jobs():
            target = args.out / f"{command.replace(' ', '_')}__{stem}.json"
            cfg = RunConfig(command=command, input=inputs / f"{stem}.json", radius=args.radius,
                            margin=args.margin, output=target, full=True, quiet=True)
            start = time.perf_counter()
            sink = io.StringIO()
            status = run(cfg, stdout=sink)
            took = time.perf_counter() - start
            flag = "" if status == expected else "  UNEXPECTED"
            bad += status != expected
            print(f"{command:22s} {stem:28s} exit={status} {took:6.2f}s  {sink.getvalue().strip()}{flag}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
