"""BLER and average-query curves for eBCH(128,106) at both abandonment thresholds.

Writes one CSV and one SVG per threshold into --outdir.
"""
import argparse
from pathlib import Path

from grandlab.sim import TrialConfig, plot_report, run_trials


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--code", default="ebch128_106")
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--min-errors", type=int, default=100)
    ap.add_argument("--max-trials", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--outdir", default="results")
    args = ap.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for b in (10**5, 10**6):
        cfg = TrialConfig(code=args.code, ebno=(3.5, 4.0, 4.5, 5.0, 5.5), b=b, trials=args.trials,
                          min_errors=args.min_errors, max_trials=args.max_trials,
                          seed=args.seed, threads=args.threads)
        rep = run_trials(cfg, progress=lambda row: print(
            f"{row.decoder} {row.ebno_db:g} dB: bler {row.bler:.2e}, avg {row.avg_queries:.1f}", flush=True))
        stem = out / f"{args.code}_b{b}"
        rep.write_csv(stem.with_suffix(".csv"))
        plot_report(rep, stem.with_suffix(".svg"))
        print(rep.to_csv())


if __name__ == "__main__":
    main()
