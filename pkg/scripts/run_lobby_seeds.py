#!/usr/bin/env python3
"""Run the bundled lobby scenario over the documented seed set and print a
per-seed metrics table plus a determinism check on the first seed."""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from errandbot.cli import data_path
from errandbot.sim import run_scripted

DOCUMENTED_SEEDS = [2, 3, 54, 63, 68]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", default=str(data_path("lobby.scenario")))
    parser.add_argument("--seeds", type=int, nargs="*", default=DOCUMENTED_SEEDS)
    args = parser.parse_args()

    print(f"{'seed':>6} {'tasks':>6} {'ped':>4} {'static':>7} {'estops':>7} "
          f"{'clearance':>10} {'sim_time':>9}")
    for seed in args.seeds:
        r = run_scripted(args.scenario, seed=seed)
        clearance = f"{r.min_pedestrian_clearance:.3f}" if r.min_pedestrian_clearance is not None else "n/a"
        print(f"{seed:>6} {r.tasks_completed:>4}/2 {r.pedestrian_collisions:>4} "
              f"{r.static_collisions:>7} {r.emergency_stops:>7} {clearance:>10} {r.sim_time:>9.1f}")

    first, second = [], []
    run_scripted(args.scenario, seed=args.seeds[0], record=first)
    run_scripted(args.scenario, seed=args.seeds[0], record=second)
    identical = first == second
    print(f"\ndeterminism (seed {args.seeds[0]}): "
          f"{'byte-identical' if identical else 'MISMATCH'} over {len(first)} snapshots")
    return 0 if identical else 1


if __name__ == "__main__":
    sys.exit(main())
