"""Weak value of the N arm over the Mach-Zehnder parameter plane.

Writes the sweep CSV (same columns as ``weakvalue mzi-sweep``) and prints a
summary: where Re N_w at the dark port is most negative, how many grid
points have a negative weak value, and how ABL tracks q^2.

    python3 scripts/mzi_landscape.py --q-steps 40 --beta-steps 36 --out mzi.csv
"""
import argparse
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from weakvalue.scenarios import QueryFailure, mzi_sweep, open_grid, phase_grid
from weakvalue.serialize import SWEEP_COLUMNS, sweep_row, to_csv


@dataclass
class Config:
    q_steps: int = 40
    beta_steps: int = 36
    out: Path | None = None


def run(cfg: Config) -> None:
    qs, betas = open_grid(cfg.q_steps), phase_grid(cfg.beta_steps)
    grid = [(q, b) for q in qs for b in betas]
    reports = mzi_sweep(qs, betas)
    rows = [sweep_row(rep, q, math.sqrt(1 - q * q), b) for rep, (q, b) in zip(reports, grid)]
    if cfg.out is not None:
        cfg.out.write_text(to_csv(SWEEP_COLUMNS, rows), encoding="utf-8")
        print(f"wrote {len(rows)} rows to {cfg.out}")

    re_d = np.array([np.nan if r[3] is None else r[3] for r in rows])
    dark = int(sum(r[8] for r in rows))
    k = int(np.nanargmin(re_d))
    print(f"grid {cfg.q_steps} x {cfg.beta_steps}, {dark} points with a dark port")
    print(f"most negative Re N_w(D) = {re_d[k]:.6f} at q = {grid[k][0]:.4f}, "
          f"beta = {grid[k][1]:.4f}")
    print(f"Re N_w(D) < 0 at {int(np.sum(re_d < 0))} of {len(rows)} points")
    abl_dev = max(abs(rep.abl["N@D"].prob(1) - q * q) for rep, (q, _) in zip(reports, grid)
                  if not isinstance(rep.abl["N@D"], QueryFailure))
    print(f"max |ABL(N | D) - q^2| = {abl_dev:.3e}")


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--q-steps", type=int, default=Config.q_steps)
    p.add_argument("--beta-steps", type=int, default=Config.beta_steps)
    p.add_argument("--out", type=Path)
    args = p.parse_args()
    run(Config(args.q_steps, args.beta_steps, args.out))


if __name__ == "__main__":
    main()
