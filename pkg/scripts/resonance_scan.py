"""Scan the dispersion-reduced second-harmonic coefficient for zeros in W.

Positive W never gives a root; the negative branch follows
W = -k^2 (1 + 4 cosh^2 k) / (1 + cosh^2 k).
"""
import argparse

import numpy as np

from wwscales import catalog as cat
from wwscales.verify import resonance_scan


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", type=float, nargs="+", default=[0.25, 0.5, 1.0, 2.0, 4.0])
    ap.add_argument("--W-min", type=float, default=0.05)
    ap.add_argument("--W-max", type=float, default=50.0)
    ap.add_argument("--samples", type=int, default=400)
    args = ap.parse_args()

    ks = tuple(args.k)
    pos = resonance_scan(k_values=ks, W_range=(args.W_min, args.W_max), samples=args.samples)
    print(f"W in ({args.W_min}, {args.W_max}): {len(pos)} roots")
    for r in pos:
        print(f"  k = {r.k:g}  W = {r.W:.10f}  |G| = {r.residual:.1e}")

    closed = cat.negative_resonance_W()
    print("negative W branch:")
    for kk in ks:
        Wc = closed.evaluate(kk, 1.0, w=0.0)
        lo, hi = 1.5 * Wc, 0.5 * Wc
        roots = resonance_scan(k_values=(kk,), W_range=(lo, hi), samples=args.samples)
        found = ", ".join(f"{r.W:.10f}" for r in roots) or "none"
        print(f"  k = {kk:g}  closed form {Wc:.10f}  bisection {found}")
        assert roots and np.isclose(roots[0].W, Wc, rtol=1e-9)


if __name__ == "__main__":
    main()
