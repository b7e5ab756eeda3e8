"""Surface construction: Sym-type immersion into the hyperboloid, its
origin-shifted flat limit, and direct Enneper-Weierstrass integration,
plus grid sampling and frame/curvature verification.

Conventions.  The hyperbolic target H^3(lambda) is the sheet
(X|X) = -1/lambda^2 in Lorentz space; the Sym-type formula is

    F^sigma = (1/lambda) Phi^H Phi

(automatically on the hyperboloid since det Phi = 1).  The shifted
variant (Phi^H Phi - I)/lambda, computed with the reduced wavefunction,
converges as lambda -> 0 to the Euclidean minimal surface of the same
data up to the fixed linear map

    (X1, X2, X3) = (-2 F1, -2 F2, 2 F3)

where F is the classical representation

    F = Re int (1/2 (1 - psi^2), i/2 (1 + psi^2), psi) eta^2 dz

which this module treats as the canonical Euclidean output.

Grid sampling integrates one seed column and then reuses the wavefunction
at the previous point of each row as the initial value for the next
(one integration sweep per row), so that the cost is O(grid) short
integrations.  Rows are independent after the seed column and may run on
a thread pool.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._quad import QuadratureFailure, adaptive_gl
from .geom import EVAL_ERRORS, DomainError, WeierstrassData
from .lsp import (PathSpec, StepUnderflow, Wavefunction, _det4, _ID4,
                  _sweep, propagate)
from .mcore import lorentz_from_hermitian

__all__ = [
    "DomainRect", "SurfacePatch", "FrameSample", "LambdaZero", "DegenerateFrame",
    "sym_immersion", "shifted_immersion", "enneper_weierstrass", "loop_period",
    "sample_surface", "frame_and_curvature",
]

TARGETS = ("h3", "e3-limit", "e3-direct")


class LambdaZero(ValueError):
    """Sym-type formulas require lambda != 0."""


class DegenerateFrame(ArithmeticError):
    """Tangent frame rank-deficient or a stencil neighbor is masked."""


@dataclass
class DomainRect:
    """Rectangle [re_min, re_max] x [im_min, im_max] sampled on an
    ny x nx grid (rows sweep the imaginary axis)."""
    re_min: float
    re_max: float
    im_min: float
    im_max: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError("resolution must be at least 2 per axis")
        if not (self.re_max > self.re_min and self.im_max > self.im_min):
            raise ValueError("empty domain rectangle")

    def xs(self):
        return np.linspace(self.re_min, self.re_max, self.nx)

    def ys(self):
        return np.linspace(self.im_min, self.im_max, self.ny)

    @property
    def dx(self):
        return (self.re_max - self.re_min) / (self.nx - 1)

    @property
    def dy(self):
        return (self.im_max - self.im_min) / (self.ny - 1)

    def point(self, i, j):
        return complex(self.xs()[j], self.ys()[i])

    def grid(self):
        return self.xs()[None, :] + 1j * self.ys()[:, None]


@dataclass
class FrameSample:
    """Frame and curvature data reconstructed at one grid point."""
    F: np.ndarray
    F_z: np.ndarray
    F_zbar: np.ndarray
    N: np.ndarray
    u: float
    H_est: float
    Q_est: complex


@dataclass
class SurfacePatch:
    """Sampled immersion grid plus per-sample residual records.

    points is (ny, nx, 4) for hyperbolic and limit targets (components
    X0..X3) and (ny, nx, 3) for the direct Euclidean target.  valid masks
    samples whose integration succeeded; residuals maps record names to
    float grids (NaN where invalid).
    """
    data: WeierstrassData
    domain: DomainRect
    target: str
    lam: float
    tol: float
    points: np.ndarray
    valid: np.ndarray
    residuals: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# pointwise immersion formulas

def _check_wavefunction(phi):
    v = np.asarray(phi.value, dtype=complex)
    if v.shape != (2, 2):
        raise ValueError("wavefunction value must be 2x2")
    d = v[0, 0] * v[1, 1] - v[0, 1] * v[1, 0]
    if abs(d - 1.0) > 1e-6:
        raise ValueError("wavefunction determinant drifted to %r; "
                         "re-integrate with a tighter tolerance" % (d,))
    return v


def sym_immersion(phi, lam=None):
    """Hyperboloid point (1/lambda) Phi^H Phi as a Lorentz 4-vector."""
    lam = phi.lam if lam is None else float(lam)
    if lam == 0.0:
        raise LambdaZero("lambda = 0 has no hyperboloid; use the shifted limit")
    v = _check_wavefunction(phi)
    p = v.conj().T @ v
    p = 0.5 * (p + p.conj().T)
    return lorentz_from_hermitian(p, tol=1e-8) / lam


def shifted_immersion(phi, lam=None):
    """Origin-shifted immersion (Phi^H Phi - I)/lambda as a 4-vector.

    With the reduced wavefunction this converges, entrywise at rate
    O(lambda), to the flat-limit surface; X0 -> 0 in the limit.
    """
    lam = phi.lam if lam is None else float(lam)
    if lam == 0.0:
        raise LambdaZero("the shift is evaluated at finite lambda")
    v = _check_wavefunction(phi)
    p = v.conj().T @ v - np.eye(2)
    p = 0.5 * (p + p.conj().T)
    return lorentz_from_hermitian(p, tol=1e-8) / lam


def _phi_vector_fn(data):
    eta_f, _, psi_f, _ = data.functions()

    def fvec(z):
        ev = eta_f(z)
        pv = psi_f(z)
        e2 = ev * ev
        p2 = pv * pv
        return np.array([0.5 * (1.0 - p2) * e2,
                         0.5j * (1.0 + p2) * e2,
                         pv * e2])

    return fvec


def enneper_weierstrass(data, path, tol=1e-10):
    """Classical minimal-surface integral F = Re int phi dz along the path."""
    path.validate()
    fvec = _phi_vector_fn(data)
    total = np.zeros(3, dtype=complex)
    for a, b in path.segments():
        total = total + adaptive_gl(fvec, a, b, tol=tol)
    return total.real.copy()


def loop_period(data, path, tol=1e-10):
    """Period integral of the integrand vector around a closed polyline.

    Returns the complex 3-vector; a surface is single-valued over the loop
    iff the real part vanishes.  Diagnostic only, nothing is enforced.
    """
    if path.points[0] != path.points[-1]:
        raise ValueError("loop_period requires a closed path")
    path.validate()
    fvec = _phi_vector_fn(data)
    total = np.zeros(3, dtype=complex)
    for a, b in path.segments():
        total = total + adaptive_gl(fvec, a, b, tol=tol)
    return total


# ---------------------------------------------------------------------------
# grid sampling

def _sym4_tuple(y, lam):
    a, b, c, d = y
    p11 = (a.conjugate() * a + c.conjugate() * c).real
    p22 = (b.conjugate() * b + d.conjugate() * d).real
    p12 = a.conjugate() * b + c.conjugate() * d
    return (0.5 * (p11 + p22) / lam, p12.real / lam,
            -p12.imag / lam, 0.5 * (p11 - p22) / lam)


def _shifted4_tuple(y, lam):
    a, b, c, d = y
    q11 = (a.conjugate() * a + c.conjugate() * c).real - 1.0
    q22 = (b.conjugate() * b + d.conjugate() * d).real - 1.0
    p12 = a.conjugate() * b + c.conjugate() * d
    return (0.5 * (q11 + q22) / lam, p12.real / lam,
            -p12.imag / lam, 0.5 * (q11 - q22) / lam)


def _probe_validity(data, zgrid, need_deta):
    eta_f, deta_f, psi_f, dpsi_f = data.functions()
    ny, nx = zgrid.shape
    valid = np.zeros((ny, nx), dtype=bool)
    for i in range(ny):
        for j in range(nx):
            z = zgrid[i, j]
            try:
                ev = eta_f(z)
                psi_f(z)
                dpsi_f(z)
                if need_deta:
                    deta_f(z)
                ok = ev != 0.0
            except EVAL_ERRORS:
                ok = False
            valid[i, j] = ok
    return valid


def sample_surface(data, domain, target, tol=1e-8, H=None, threads=1,
                   system=None):
    """Sample the immersion over a rectangular grid into a SurfacePatch.

    target 'h3' integrates the full system and applies the Sym-type
    formula; 'e3-limit' integrates the reduced system and applies the
    shifted formula; 'e3-direct' accumulates the classical integral.
    Residual records: 'hyperboloid' and 'det_drift' for h3, 'x0_abs' and
    'det_drift' for the limit target.

    system overrides the linear system for the h3 target: 'reduced' uses
    the holomorphic form, whose Sym-type image is the same surface moved
    by one global isometry (the gauge between the systems is unitary).

    The grid is probed first; points where the data fails to evaluate are
    masked, as are points whose row integration fails.
    """
    if target not in TARGETS:
        raise ValueError("target must be one of %r" % (TARGETS,))
    lam = data.lam
    if target in ("h3", "e3-limit") and lam == 0.0:
        raise LambdaZero("target %r needs lambda != 0" % (target,))
    if system is None:
        system = "full" if target == "h3" else "reduced"
    elif target != "h3" or system not in ("full", "reduced"):
        raise ValueError("system override applies to the h3 target only")
    zgrid = domain.grid()
    ny, nx = zgrid.shape
    valid = _probe_validity(data, zgrid, need_deta=(system == "full"))
    if target == "e3-direct":
        points = np.full((ny, nx, 3), np.nan)
        residuals = {}
    else:
        points = np.full((ny, nx, 4), np.nan)
        residuals = {"det_drift": np.full((ny, nx), np.nan)}
        if target == "h3":
            residuals["hyperboloid"] = np.full((ny, nx), np.nan)
        else:
            residuals["x0_abs"] = np.full((ny, nx), np.nan)

    hval = lam if H is None else float(H)

    if target == "e3-direct":
        fvec = _phi_vector_fn(data)

        def hop(z_from, z_to, acc):
            return acc + adaptive_gl(fvec, z_from, z_to, tol=tol)

        start_acc = np.zeros(3, dtype=complex)
        hop_errors = (QuadratureFailure,) + EVAL_ERRORS

        def emit(i, j, acc):
            points[i, j, :] = acc.real
    else:
        def hop(z_from, z_to, y):
            return propagate(data, z_from, z_to, y, tol=tol, system=system, H=hval)

        start_acc = _ID4
        hop_errors = (StepUnderflow, DomainError) + EVAL_ERRORS

        def emit(i, j, y):
            drift = abs(_det4(y) - 1.0)
            residuals["det_drift"][i, j] = drift
            if target == "h3":
                x = _sym4_tuple(y, lam)
                residuals["hyperboloid"][i, j] = (x[1] * x[1] + x[2] * x[2]
                                                  + x[3] * x[3] - x[0] * x[0]
                                                  + 1.0 / (lam * lam))
            else:
                x = _shifted4_tuple(y, lam)
                residuals["x0_abs"][i, j] = abs(x[0])
            points[i, j, :] = x

    # seed: base point to the first valid point of column 0, then down it
    col_vals = [None] * ny
    cur = None
    cur_z = data.z0
    for i in range(ny):
        if not valid[i, 0]:
            continue
        z = zgrid[i, 0]
        try:
            nxt = hop(cur_z, z, start_acc if cur is None else cur)
        except hop_errors:
            valid[i, 0] = False
            continue
        col_vals[i] = nxt
        cur = nxt
        cur_z = z

    def run_row(i):
        y = col_vals[i]
        if y is None:
            valid[i, 1:] = False
            return
        emit(i, 0, y)
        cur = y
        cur_z = zgrid[i, 0]
        for j in range(1, nx):
            if not valid[i, j]:
                continue
            z = zgrid[i, j]
            try:
                nxt = hop(cur_z, z, cur)
            except hop_errors:
                valid[i, j] = False
                continue
            emit(i, j, nxt)
            cur = nxt
            cur_z = z

    rows = [i for i in range(ny)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run_row, rows))
    else:
        for i in rows:
            run_row(i)

    return SurfacePatch(data=data, domain=domain, target=target, lam=lam,
                        tol=tol, points=points, valid=valid, residuals=residuals)


# ---------------------------------------------------------------------------
# frame reconstruction

_G_LORENTZ = np.diag([-1.0, 1.0, 1.0, 1.0])


def _inner_c(x, y, lorentz):
    if lorentz:
        return complex(x[1] * y[1] + x[2] * y[2] + x[3] * y[3] - x[0] * y[0])
    return complex(x[0] * y[0] + x[1] * y[1] + x[2] * y[2])


def frame_and_curvature(patch, index, lam=None):
    """Reconstruct the frame at an interior grid point by differencing.

    F_z, F_zbar are Wirtinger central differences of the stored points;
    the normal N solves (F|N) = (F_z|N) = (F_zbar|N) = 0 with (N|N) = 1
    for Lorentz targets (sign such that (F_zzbar|N) >= 0, the choice that
    is continuous across the grid for patches with H > 0), and is the
    normalized cross product of the tangents for Euclidean targets.  The
    estimates follow the defining relations

        e^u = 2 (F_z|F_zbar),  H = 2 e^{-u} (F_zzbar|N),  Q = (F_zz|N).
    """
    i, j = index
    ny, nx, dim = patch.points.shape
    if not (1 <= i <= ny - 2 and 1 <= j <= nx - 2):
        raise ValueError("interior grid point required, got (%d, %d)" % (i, j))
    block = patch.valid[i - 1:i + 2, j - 1:j + 2]
    if not bool(np.all(block)):
        raise DegenerateFrame("stencil touches a masked sample at (%d, %d)" % (i, j))
    lorentz = dim == 4
    p = patch.points
    dx = patch.domain.dx
    dy = patch.domain.dy
    f = p[i, j].astype(float)
    wide = (2 <= i <= ny - 3 and 2 <= j <= nx - 3
            and bool(np.all(patch.valid[i - 2:i + 3, j - 2:j + 3])))
    if wide:
        # fourth-order stencils; exact through quartics, which keeps the
        # conformality residual at truncation level even on coarse grids
        def d1x(r):
            return (-p[r, j + 2] + 8.0 * p[r, j + 1]
                    - 8.0 * p[r, j - 1] + p[r, j - 2]) / (12.0 * dx)

        fx = d1x(i)
        fy = (-p[i + 2, j] + 8.0 * p[i + 1, j]
              - 8.0 * p[i - 1, j] + p[i - 2, j]) / (12.0 * dy)
        fxx = (-p[i, j + 2] + 16.0 * p[i, j + 1] - 30.0 * p[i, j]
               + 16.0 * p[i, j - 1] - p[i, j - 2]) / (12.0 * dx * dx)
        fyy = (-p[i + 2, j] + 16.0 * p[i + 1, j] - 30.0 * p[i, j]
               + 16.0 * p[i - 1, j] - p[i - 2, j]) / (12.0 * dy * dy)
        fxy = (-d1x(i + 2) + 8.0 * d1x(i + 1)
               - 8.0 * d1x(i - 1) + d1x(i - 2)) / (12.0 * dy)
    else:
        fx = (p[i, j + 1] - p[i, j - 1]) / (2.0 * dx)
        fy = (p[i + 1, j] - p[i - 1, j]) / (2.0 * dy)
        fxx = (p[i, j + 1] - 2.0 * p[i, j] + p[i, j - 1]) / (dx * dx)
        fyy = (p[i + 1, j] - 2.0 * p[i, j] + p[i - 1, j]) / (dy * dy)
        fxy = (p[i + 1, j + 1] - p[i + 1, j - 1] - p[i - 1, j + 1]
               + p[i - 1, j - 1]) / (4.0 * dx * dy)
    f_z = 0.5 * (fx - 1j * fy)
    f_zbar = 0.5 * (fx + 1j * fy)
    f_zzbar = 0.25 * (fxx + fyy)            # real vector
    f_zz = 0.25 * (fxx - fyy) - 0.5j * fxy
    eu = 2.0 * _inner_c(f_z, f_zbar, lorentz).real
    if not (eu > 0.0 and math.isfinite(eu)):
        raise DegenerateFrame("conformal factor nonpositive at (%d, %d)" % (i, j))
    u = math.log(eu)
    if lorentz:
        rows = np.vstack([f, fx, fy])
        _, sv, vt = np.linalg.svd(rows @ _G_LORENTZ)
        if sv[0] == 0.0 or sv[2] <= 1e-8 * sv[0]:
            # rank < 3 means the nullspace is not one-dimensional and the
            # normal direction is ambiguous
            raise DegenerateFrame("frame rows rank-deficient at (%d, %d)" % (i, j))
        n_vec = vt[-1]
        nn = float(n_vec @ _G_LORENTZ @ n_vec)
        if nn <= 1e-12:
            raise DegenerateFrame("normal direction not spacelike at (%d, %d)" % (i, j))
        n_vec = n_vec / math.sqrt(nn)
        if float(f_zzbar @ _G_LORENTZ @ n_vec) < 0.0:
            n_vec = -n_vec
    else:
        n_vec = np.cross(fx, fy)
        norm = float(np.linalg.norm(n_vec))
        if norm <= 1e-14:
            raise DegenerateFrame("tangents collinear at (%d, %d)" % (i, j))
        n_vec = n_vec / norm
    h_est = 2.0 * _inner_c(f_zzbar, n_vec, lorentz).real / eu
    q_est = _inner_c(f_zz, n_vec, lorentz)
    return FrameSample(F=f, F_z=f_z, F_zbar=f_zbar, N=n_vec,
                       u=u, H_est=h_est, Q_est=q_est)
