#!/usr/bin/env python3
"""Scan seeds of a scenario for runs that finish every task with zero
collisions. Used to pick the documented lobby seed set."""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from errandbot.cli import data_path
from errandbot.sim import run_scripted


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", default=str(data_path("lobby.scenario")))
    parser.add_argument("--start", type=int, default=1)
    parser.add_argument("--count", type=int, default=120)
    parser.add_argument("--want", type=int, default=5)
    args = parser.parse_args()

    clean = []
    for seed in range(args.start, args.start + args.count):
        r = run_scripted(args.scenario, seed=seed)
        tasks_total = r.tasks_completed + r.tasks_failed
        ok = (
            r.tasks_failed == 0
            and r.tasks_completed == tasks_total
            and r.pedestrian_collisions == 0
            and r.static_collisions == 0
        )
        marker = "CLEAN" if ok else "     "
        print(f"{marker} seed={seed:4d} tasks={r.tasks_completed} ped={r.pedestrian_collisions} "
              f"static={r.static_collisions} estops={r.emergency_stops} t={r.sim_time:.1f}")
        if ok:
            clean.append(seed)
        if len(clean) >= args.want:
            break

    print(f"\nclean seeds: {clean}")
    return 0 if len(clean) >= args.want else 1


if __name__ == "__main__":
    sys.exit(main())
