"""Write the bundled example systems to data/ as JSON input files."""
import argparse
import json
from pathlib import Path

from cubestab import corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    files = {f"gp_{k}.json": v for k, v in corpus.GRAPH_PRODUCTS.items()}
    files.update({f"coxeter_{k}.json": v for k, v in corpus.COXETER.items()})
    files["action_star_violation.json"] = corpus.STAR_VIOLATION
    for name, data in sorted(files.items()):
        (args.out / name).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
        print(args.out / name)


if __name__ == "__main__":
    main()
