"""Luxemburg norms from Orlicz families, with the certified bracket.

Power families reproduce plain p-norms, which anchors the solver, and
make_orlicz(alpha, beta) gives the two-parameter bump used everywhere
else in the package.
"""

import numpy as np

from smoothnorm.orlicz import (OrliczFamily, check_lemma1_bounds,
                               luxemburg_norm, make_orlicz)


def main():
    rng = np.random.default_rng(101)

    print("power family phi(s) = s^2 on 5 coordinates")
    fam = OrliczFamily([lambda s: np.asarray(s, float) ** 2] * 5)
    for _ in range(3):
        c = rng.standard_normal(5)
        lux = luxemburg_norm(fam, c)
        l2 = float(np.linalg.norm(c))
        print(f"  luxemburg {lux:.12f}  l2 {l2:.12f}  diff {abs(lux - l2):.2e}")

    print()
    print("full solver output carries the bisection bracket")
    res = luxemburg_norm(fam, rng.standard_normal(5), full_output=True)
    print(f"  value {res.value:.12f}")
    print(f"  bracket [{res.lo:.12f}, {res.hi:.12f}]")
    print(f"  modular at value {res.modular_at_value:.12f}")
    print(f"  iterations {res.iterations}")

    print()
    alpha, beta = 0.5, 2.0
    print(f"make_orlicz({alpha}, {beta}): zero below alpha, reaches 1 by beta")
    fn = make_orlicz(alpha, beta)
    for s in (0.25, 0.5, 1.0, 1.5, 2.0):
        print(f"  phi({s}) = {float(fn(s)):.6f}")

    fam = OrliczFamily([fn] * 6)
    vectors = rng.standard_normal((1000, 6))
    report = check_lemma1_bounds(fam, alpha, beta, vectors)
    print()
    print(f"two-sided bound alpha*||f||_phi <= ||f||_inf <= beta*||f||_phi")
    print(f"  checked {report.checked}, violations {report.violations}")


if __name__ == "__main__":
    main()
