#!/usr/bin/env python3
"""Write the named example matrices as JSON files for use with the CLI.

Seeded examples (ex2.3, ex2.4) are scaled with --seed.
"""
import argparse
import sys
from pathlib import Path

from blockdom.experiments import EXPERIMENT_IDS, SEEDED_IDS, build_example
from blockdom.matrixio import write_matrix_file


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output", default="matrices", help="target directory")
    parser.add_argument("--seed", type=int, default=42,
                        help="row-scaling seed for the seeded examples")
    args = parser.parse_args()

    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    for exp_id in EXPERIMENT_IDS:
        seed = args.seed if exp_id in SEEDED_IDS else None
        path = out / f"{exp_id.replace('.', '_')}.json"
        write_matrix_file(path, build_example(exp_id, seed))
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
