"""Distribution of queries-to-first-codeword for plain ORBGRAND."""
import argparse

from grandlab.sim import TrialConfig, query_histogram, run_trials


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--code", default="ebch64_45")
    ap.add_argument("--ebno", type=float, default=4.0)
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--b", type=int, default=10**5)
    ap.add_argument("--threshold", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = TrialConfig(code=args.code, decoders=("orbgrand", "seg-orbgrand"), ebno=(args.ebno,),
                      b=args.b, trials=args.trials, seed=args.seed, threads=1)
    rep = run_trials(cfg)
    for row in rep.rows:
        h = query_histogram(row.queries, threshold=args.threshold)
        print(f"{row.decoder}: avg {row.avg_queries:.1f}, "
              f"{100 * h.frac_above:.2f}% above {args.threshold} queries")
        for lo, hi, f in zip(h.edges[:-1], h.edges[1:], h.freq):
            if f:
                print(f"  [{int(lo):>7}, {int(hi):>7})  {f:.4f}")


if __name__ == "__main__":
    main()
