"""Evaluate the four built-in circuits in both regimes and diff against the
reference table. Writes per-state CSV reports next to the summary."""
import argparse
from pathlib import Path

from qagency import agency, reference, serialize


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", type=Path, default=Path("results/table"))
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)

    breaches = 0
    for spec in agency.builtin_circuits():
        for regime in agency.REGIMES:
            rep = agency.evaluate(spec, regime)
            slug = spec.name.replace("'", "p").replace("(", "").replace(")", "")
            (args.outdir / f"{slug}_{regime}.csv").write_text(serialize.report_to_csv(rep))
            diffs = reference.compare(rep)
            worst = max(diffs, key=lambda d: d.deviation)
            bad = sum(not d.ok for d in diffs)
            breaches += bad
            print(f"{spec.name:10} {regime:7} fidelity avg {rep.cell('fidelity', 'average'):.5f}  "
                  f"max dev {worst.deviation:.1e} ({worst.metric} {worst.stat})  "
                  f"{'ok' if not bad else f'{bad} breaches'}")
    print(f"reports in {args.outdir}; {breaches} cells out of tolerance")
    return 1 if breaches else 0


if __name__ == "__main__":
    raise SystemExit(main())
