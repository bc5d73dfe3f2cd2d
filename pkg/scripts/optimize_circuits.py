"""Search the superposed control-table entries of each built-in circuit and
compare the best average fidelity with the reference tables."""
import argparse
import json
from pathlib import Path

from qagency import agency, optimizer, serialize


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--budget", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--regime", choices=agency.REGIMES, default="copies")
    ap.add_argument("--objective", choices=optimizer.STATISTICS, default="average")
    ap.add_argument("--outdir", type=Path, default=Path("results/optimize"))
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)

    for spec in agency.builtin_circuits():
        space = optimizer.ParamSpace.from_spec(spec)
        if space.dim == 0:
            print(f"{spec.name:10} no superposed entries, skipped")
            continue
        res = optimizer.optimize(space, args.regime, args.budget, args.seed,
                                 statistic=args.objective)
        # the best circuit under the other regime, for reference
        other = "clones" if args.regime == "copies" else "copies"
        cross = optimizer.objective(res.best_spec, other, args.objective)
        print(f"{spec.name:10} dim {space.dim:2}  baseline {res.baseline_value:.5f}  "
              f"best {res.best_value:.5f}  delta {res.best_value - res.baseline_value:+.5f}  "
              f"({other}: {optimizer.objective(spec, other, args.objective):.5f} -> {cross:.5f})")
        slug = spec.name.replace("'", "p").replace("(", "").replace(")", "")
        (args.outdir / f"{slug}_best.json").write_text(json.dumps({
            "baseline": res.baseline_value, "best": res.best_value,
            "params": [float(t) for t in res.best_params],
            "spec": serialize.spec_to_dict(res.best_spec),
        }, indent=2))


if __name__ == "__main__":
    main()
