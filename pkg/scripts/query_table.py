"""Average queries at 5 dB for plain and segmented ORBGRAND.

    python3 scripts/query_table.py --trials 20000 --threads 4
"""
import argparse

from grandlab.sim import TrialConfig, run_trials

# code -> {b: (plain, segmented)} reference averages
REFERENCE = {
    "ebch128_106": {10**5: (460.7, 208.9), 10**6: (872.7, 314.9)},
    "pac64_44": {10**5: (95.1, 49.0)},
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=2023)
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args()

    print(f"{'code':<12} {'b':>8} {'plain':>9} {'ref':>7} {'seg':>9} {'ref':>7} {'ratio':>6}")
    for code, by_b in REFERENCE.items():
        for b, (p_ref, s_ref) in by_b.items():
            cfg = TrialConfig(code=code, ebno=(5.0,), b=b, trials=args.trials,
                              seed=args.seed, threads=args.threads)
            rep = run_trials(cfg)
            p = rep.row("orbgrand", 5.0).avg_queries
            s = rep.row("seg-orbgrand", 5.0).avg_queries
            print(f"{code:<12} {b:>8.0e} {p:>9.1f} {p_ref:>7.1f} {s:>9.1f} {s_ref:>7.1f} {s / p:>6.3f}")


if __name__ == "__main__":
    main()
