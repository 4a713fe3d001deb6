"""Rotation numbers of the singular-limit circle map below the fold (B < 1/(2 pi)).

The map is a circle diffeomorphism, so rho(a) is a devil's staircase: locked
plateaus at rationals, the widest one at rho = 0 around a = 0.
"""
import numpy as np

from shearkick.singular1d import plateaus, staircase


def main():
    table = staircase(0.1, np.linspace(0.0, 1.0, 256, endpoint=False), n=5000)
    for lo, hi, rho in plateaus(table, tol=1e-3)[:8]:
        print(f"rho ~ {rho:.4f} on a in [{lo:.4f}, {hi:.4f}]")


if __name__ == "__main__":
    main()
