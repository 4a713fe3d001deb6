"""How shear turns a kicked limit cycle chaotic.

Weak shear leaves an attracting invariant circle (exponent near zero or
negative).  Strong shear folds the kicked cycle over itself and the top
Lyapunov exponent is usually positive, with periodic sink windows in between.
"""
import numpy as np

from shearkick.core2d import ShearParams, fold_threshold_sigma, trapping_bound
from shearkick.geometry import fold_report, horseshoe_crossing_diagnostic, image_of_cycle
from shearkick.lyapunov import classify, ensemble_protocol


def main():
    lam, A, tau = 0.1, 0.1, 10.0
    print(f"fold threshold at tau={tau}: sigma* = {fold_threshold_sigma(lam, A, tau):.5f}")
    print(f"{'sigma':>6} {'h':>8} {'folds':>5} {'crossings':>9} {'median exponent':>16}  class")
    for sigma in (0.05, 0.5, 2.0, 4.0):
        p = ShearParams(sigma, lam, A, tau)
        folds = fold_report(image_of_cycle(p)).turning_points
        cross = horseshoe_crossing_diagnostic(p)["full_crossings"]
        rep = ensemble_protocol(p, n_orbits=5, n_steps=20_000, seed=0)
        med = float(np.median(rep.kept))
        print(f"{sigma:6.2f} {trapping_bound(p):8.5f} {folds:5d} {cross:9d} {med:16.5f}  {classify(med)}")


if __name__ == "__main__":
    main()
