"""How the 64 least reliable positions split between the two halves of eBCH(128,106)."""
import argparse

import numpy as np

from grandlab.codes import get_code
from grandlab.segmentation import find_segments
from grandlab.sim import ebno_to_sigma, segment_reliability_stats


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ebno", type=float, nargs="+", default=[3.5, 4.5, 5.5])
    ap.add_argument("--trials", type=int, default=15_000)
    ap.add_argument("--seed", type=int, default=9)
    args = ap.parse_args()

    code = get_code("ebch128_106")
    seg = find_segments(code.H)
    for e in args.ebno:
        st = segment_reliability_stats(code, seg, ebno_to_sigma(e, code.rate), args.trials, args.seed)
        print(f"{e:4.1f} dB  mean {np.round(st.mean, 3)}  std {np.round(st.std, 3)}")
    # counts follow a hypergeometric law when positions are exchangeable
    print(f"hypergeometric std: {np.sqrt(64 * 0.5 * 0.5 * 64 / 127):.3f}")


if __name__ == "__main__":
    main()
