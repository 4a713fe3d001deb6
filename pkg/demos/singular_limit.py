"""Large-tau limit: the 2D kicked map collapses to a circle map.

For sigma/lam fixed and tau = k + a with k growing, the per-kick exponent of
the 2D map approaches that of theta -> theta + a + (sigma/lam) A sin(2 pi theta).
The gap shrinks like the neglected contraction e^{-lam k}.
"""
from shearkick.core2d import ShearParams
from shearkick.singular1d import compare_to_2d


def main():
    lam, sigma, A, a = 0.1, 2.0, 0.1, 0.3
    print(f"{'lam k':>6} {'lambda_1D':>10} {'lambda_2D':>10} {'gap':>8}")
    for k in (10, 20, 30, 60):
        c = compare_to_2d(ShearParams(sigma, lam, A, k + a), n=200_000)
        print(f"{lam * k:6.1f} {c.lambda_1d:10.5f} {c.lambda_2d:10.5f} {c.gap:8.5f}")


if __name__ == "__main__":
    main()
