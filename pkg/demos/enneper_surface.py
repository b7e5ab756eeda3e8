"""The classical Enneper minimal surface from its Weierstrass data.

eta = 1, psi = z is the simplest admissible data set.  The script checks
two hand-integrable anchor points, samples a mesh, and writes an OBJ file
next to the working directory.

Run:  python3 demos/enneper_surface.py
"""

import numpy as np

from solsurf import (DomainRect, PathSpec, WeierstrassData,
                     enneper_weierstrass, frame_and_curvature, parse,
                     sample_surface, write_obj)


def main():
    data = WeierstrassData(eta=parse("1"), psi=parse("z"), z0=0j, lam=1.0)

    print("anchor points of the integral representation")
    print("-" * 60)
    for z, want in ((1.0, (1 / 3, 0.0, 0.5)), (1j, (0.0, -1 / 3, -0.5))):
        f = enneper_weierstrass(data, PathSpec.line(0j, z), tol=1e-12)
        print("F(%s) = (%.12f, %.12f, %.12f)" % (z, *f))
        print("   exact (%.12f, %.12f, %.12f), deviation %.2e"
              % (*want, float(np.max(np.abs(f - np.array(want))))))
    print()

    print("sampled patch and curvature of the reconstruction")
    print("-" * 60)
    domain = DomainRect(-1.2, 1.2, -1.2, 1.2, 49, 49)
    patch = sample_surface(data, domain, "e3-direct", tol=1e-10)
    fr = frame_and_curvature(patch, (24, 24))
    print("grid %dx%d, all samples valid: %s"
          % (49, 49, bool(np.all(patch.valid))))
    print("mean curvature at the center: %.3e (minimal surface: 0)" % fr.H_est)
    print("normal at the center:", np.round(fr.N, 6))

    nv, nf = write_obj(patch, "enneper.obj")
    print("wrote enneper.obj (%d vertices, %d faces)" % (nv, nf))


if __name__ == "__main__":
    main()
