#!/usr/bin/env python3
"""Benchmark-table runner: one row of mean (std) MSE per dataset.

Each positional argument is a CSV file with the target in its last column
(header row auto-detected). Categorical columns, if any, must be named with
--categorical and apply to every file, so run heterogeneous datasets
separately.
"""

import argparse
import sys

from uncoupled import (
    DEFAULT_SEED,
    CsvSchema,
    ExperimentSpec,
    METHOD_ORDER,
    load_csv,
    run_benchmark,
)


def sniff_header(path):
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
    stripped = first.replace("e", "").replace("E", "").replace("+", "").replace("-", "")
    return any(c.isalpha() for c in stripped)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("files", nargs="+")
    ap.add_argument("--n-r", type=int, default=5000)
    ap.add_argument("--repeats", type=int, default=100)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--jobs", type=int, default=4)
    ap.add_argument("--categorical", action="append", default=[])
    ap.add_argument("--empirical-cdf", action="store_true")
    args = ap.parse_args()

    spec = ExperimentSpec(
        n_u=1, n_r_values=(args.n_r,), repeats=args.repeats, seed=args.seed
    )
    header = "dataset".ljust(16) + "".join(m.rjust(18) for m in METHOD_ORDER)
    print(header)
    for path in args.files:
        schema = CsvSchema(
            target_column=-1,
            categorical_columns=tuple(args.categorical),
            has_header=sniff_header(path),
        )
        data, dropped = load_csv(path, schema)
        table = run_benchmark(data, spec, jobs=args.jobs, empirical_cdf=args.empirical_cdf)
        cells = []
        for m in METHOD_ORDER:
            row = table.row(m, args.n_r)
            cells.append(f"{row.mean_mse:.1f} ({row.std_mse:.1f})".rjust(18))
        name = path.rsplit("/", 1)[-1].removesuffix(".csv")
        print(name.ljust(16) + "".join(cells) + f"   [n={data.n}, dropped={dropped}]")
    return 0


if __name__ == "__main__":
    sys.exit(main())
