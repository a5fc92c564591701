"""Compare crack-tip advance across the three fracture models.

Runs the straight-crack pull for each model on a common mesh, tracks the
tip position along the symmetry line at every output step, and writes one
tip-history CSV plus a final-state snapshot per model.
"""

import argparse
import csv
import time
from pathlib import Path

from thermofrac import cli_io
from thermofrac import scenarios as sc
from thermofrac import steppers as sp

MODELS = ("fpfm", "tfpfm1", "tfpfm2")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--resolution", default="medium",
                    choices=sorted(sc.RESOLUTIONS))
    ap.add_argument("--delta", type=float, default=0.5)
    ap.add_argument("--t-end", type=float, default=0.8)
    ap.add_argument("--out", type=Path, default=Path("runs/crack_speed"))
    args = ap.parse_args(argv)

    args.out.mkdir(parents=True, exist_ok=True)
    histories = {}
    for model in MODELS:
        cfg = sc.builtin("straight_crack").variant(
            model=model, resolution=args.resolution, delta=args.delta,
            t_end=args.t_end)
        tips = []

        def hook(state, rec, tips=tips):
            tips.append((state.t, sc.crack_tip_tracker(state)))

        start = time.monotonic()
        result = sp.run(cfg, hooks=(hook,))
        print(f"{model}: {len(result.records) - 1} steps in "
              f"{time.monotonic() - start:.0f}s, final tip {tips[-1][1]:.4f}")
        histories[model] = tips
        cli_io.write_snapshot(result.state, cfg.mat,
                              args.out / f"final_{model}.vtk")
        cli_io.write_energy_csv(result.records,
                                args.out / f"energies_{model}.csv")

    times = [t for t, _ in histories[MODELS[0]]]
    with open(args.out / "tips.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"tip_{m}" for m in MODELS])
        for i, t in enumerate(times):
            writer.writerow([f"{t:.6f}"]
                            + [f"{histories[m][i][1]:.6f}" for m in MODELS])

    print(f"\n{'t':>6} " + " ".join(f"{m:>10}" for m in MODELS))
    for frac in (0.25, 0.5, 0.75, 1.0):
        i = min(int(frac * (len(times) - 1)), len(times) - 1)
        print(f"{times[i]:>6.2f} "
              + " ".join(f"{histories[m][i][1]:>10.4f}" for m in MODELS))
    print(f"\nwrote {args.out}/tips.csv")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
