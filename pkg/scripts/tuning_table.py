"""Segmented ORBGRAND with and without reliability-based tuning offsets."""
import argparse

from grandlab.sim import TrialConfig, run_trials


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, default=0.2)
    ap.add_argument("--rho", type=float, default=0.3)
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--b", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=1010)
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args()

    ebno = (4.0, 4.5, 5.0, 5.5)
    base = dict(code="ebch128_106", decoders=("seg-orbgrand",), ebno=ebno, b=args.b,
                trials=args.trials, seed=args.seed, threads=args.threads)
    plain = run_trials(TrialConfig(**base))
    tuned = run_trials(TrialConfig(**base, tuning=(args.eps, args.rho)))
    print(f"{'dB':>4} {'untuned':>10} {'tuned':>10} {'gain%':>6} {'bler':>10} {'bler tuned':>10}")
    for e in ebno:
        u, t = plain.row("seg-orbgrand", e), tuned.row("seg-orbgrand", e)
        gain = 100 * (1 - t.avg_queries / u.avg_queries)
        print(f"{e:4.1f} {u.avg_queries:10.1f} {t.avg_queries:10.1f} {gain:6.1f} "
              f"{u.bler:10.2e} {t.bler:10.2e}")


if __name__ == "__main__":
    main()
