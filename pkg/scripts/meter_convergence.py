"""How fast the Gaussian-pointer readout approaches its two limits.

For each operator of a built-in scenario, prints the error of pointer_mean/g
against Re(weak value) as g/sigma shrinks, the fitted log-log slope, and the
distance of the peak weights from the ABL distribution as g/sigma grows.

    python3 scripts/meter_convergence.py --scenario threebox
"""
import argparse
from dataclasses import dataclass

import numpy as np

from weakvalue.measure import SpectralData, abl_probability, weak_value
from weakvalue.meter import PointerModel, peak_weights, weak_shift_ratio
from weakvalue.scenarios import (hardy_operators, hardy_prepost, three_box_operators,
                                 three_box_prepost)


@dataclass
class Config:
    scenario: str = "threebox"
    weak_ratios: tuple[float, ...] = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)
    strong_ratios: tuple[float, ...] = (3.0, 10.0, 30.0, 1e3)
    sigma: float = 1.0


def run(cfg: Config) -> None:
    if cfg.scenario == "threebox":
        pp, ops = three_box_prepost(), three_box_operators()
    else:
        pp, ops = hardy_prepost(), hardy_operators()
    for name, op in ops.items():
        spec = SpectralData.for_projector(op)
        target = weak_value(op, pp).real
        errs = np.array([abs(weak_shift_ratio(spec, pp, PointerModel(r * cfg.sigma, cfg.sigma))
                             - target) for r in cfg.weak_ratios])
        nz = errs > 1e-13  # exact readouts leave only roundoff, nothing to fit
        slope = (np.polyfit(np.log(np.array(cfg.weak_ratios)[nz]), np.log(errs[nz]), 1)[0]
                 if nz.sum() >= 2 else float("nan"))
        print(f"{name}: Re weak value {target:+.6f}")
        for r, e in zip(cfg.weak_ratios, errs):
            print(f"  g/sigma = {r:8.1e}   |mean/g - Re w| = {e:.3e}")
        print(f"  log-log slope {slope:.3f}")
        abl = abl_probability(spec, pp)
        for r in cfg.strong_ratios:
            peaks = peak_weights(spec, pp, PointerModel(r * cfg.sigma, cfg.sigma))
            dev = max(abs(peaks[o] - p) for o, p in abl.entries)
            print(f"  g/sigma = {r:8.1e}   max |peak weight - ABL| = {dev:.3e}")


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--scenario", choices=("threebox", "hardy"), default=Config.scenario)
    p.add_argument("--sigma", type=float, default=Config.sigma)
    args = p.parse_args()
    run(Config(scenario=args.scenario, sigma=args.sigma))


if __name__ == "__main__":
    main()
