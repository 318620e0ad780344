#!/usr/bin/env python3
"""Run the KB-growth experiment on the bundled corpus and print the metric
evolution per batch, frozen KB vs analyst-augmented KB, plus the shuffle
stability check.

Usage: python scripts/run_temporal.py [--batch-size 5] [--shuffles 10]
"""

from __future__ import annotations

import argparse
import statistics

from stixpipe.evaluate import (
    load_temporal_corpus,
    seed_kb_from_specs,
    shuffled_experiment_means,
    temporal_experiment,
)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--batch-size", type=int, default=5)
    ap.add_argument("--shuffles", type=int, default=10)
    ap.add_argument("--corpus", help="alternative corpus JSON")
    args = ap.parse_args()

    specs, reports = load_temporal_corpus(args.corpus)
    frozen = temporal_experiment(reports, seed_kb_from_specs(specs),
                                 batch_size=args.batch_size, augment=False)
    augmented = temporal_experiment(reports, seed_kb_from_specs(specs),
                                    batch_size=args.batch_size, augment=True)

    print(f"{len(reports)} reports, batches of {args.batch_size}")
    print(f"{'batch':>5}  {'P frozen':>9} {'P augm':>7}   "
          f"{'R frozen':>9} {'R augm':>7}   {'F1 frozen':>9} {'F1 augm':>7}")
    for i, (f, a) in enumerate(zip(frozen, augmented), start=1):
        print(f"{i:>5}  {f.precision:>9.3f} {a.precision:>7.3f}   "
              f"{f.recall:>9.3f} {a.recall:>7.3f}   {f.f1:>9.3f} {a.f1:>7.3f}")

    if args.shuffles:
        means = shuffled_experiment_means(
            reports, lambda: seed_kb_from_specs(specs),
            n_shuffles=args.shuffles, batch_size=args.batch_size)
        print(f"\nmean F1 over batches across {args.shuffles} shuffled orders: "
              f"{statistics.mean(means):.4f} (std {statistics.pstdev(means):.4f})")


if __name__ == "__main__":
    main()
