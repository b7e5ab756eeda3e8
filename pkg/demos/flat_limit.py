"""The flat limit lambda -> 0.

With the Sym point shifted so the constant part drops out, the
hyperbolic immersion converges entrywise to the classical
Enneper-Weierstrass minimal surface of the same data under the
component map (X1, X2, X3) = (-2 F1, -2 F2, 2 F3), while the time
component X0 decays.  The convergence is first order in lambda; the
script tabulates the error on a ladder of lambda values and fits the
order.

Run:  python3 demos/flat_limit.py
"""

import numpy as np

from solsurf import (PathSpec, WeierstrassData, enneper_weierstrass,
                     integrate_reduced, parse, shifted_immersion)


def main():
    eta, psi = parse("1"), parse("z")
    points = [0.4 + 0.2j, -0.3 + 0.5j, 0.6 - 0.4j]
    lams = [0.4, 0.2, 0.1, 0.05, 0.025, 0.0125]

    data0 = WeierstrassData(eta=eta, psi=psi, z0=0j, lam=1.0)
    targets = []
    for z in points:
        f = enneper_weierstrass(data0, PathSpec.line(0j, z), tol=1e-12)
        targets.append(np.array([0.0, -2 * f[0], -2 * f[1], 2 * f[2]]))

    print("max deviation over %d sample points, Enneper data" % len(points))
    print("%-10s %-14s %s" % ("lambda", "error", "ratio"))
    print("-" * 36)
    errs = []
    for lam in lams:
        data = WeierstrassData(eta=eta, psi=psi, z0=0j, lam=lam)
        worst = 0.0
        for z, tgt in zip(points, targets):
            wf = integrate_reduced(data, PathSpec.line(0j, z), tol=1e-11)
            worst = max(worst, float(np.max(np.abs(shifted_immersion(wf)
                                                   - tgt))))
        errs.append(worst)
        ratio = errs[-2] / worst if len(errs) > 1 else float("nan")
        print("%-10g %-14.6e %.3f" % (lam, worst, ratio))

    order = np.polyfit(np.log(lams), np.log(errs), 1)[0]
    print("-" * 36)
    print("fitted order: %.3f (halving lambda should halve the error)" % order)


if __name__ == "__main__":
    main()
