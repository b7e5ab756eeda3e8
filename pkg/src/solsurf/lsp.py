"""Path integration of the linear spectral problems, with two independent
cross-checks: a Picard-series oracle and the gauge transform.

Two systems share the integrator core.  The full system

    Phi_z = U Phi,   Phi_zbar = V^H Phi

uses the Lax matrices of geom.build_UV over Lemma-2 fields; along a path
gamma(t) it becomes dPhi/dt = (U gamma' + V^H conj(gamma')) Phi.  The
reduced system

    Psi_z = lambda eta^2 [[psi, -1], [psi^2, -psi]] Psi,   Psi_zbar = 0

is holomorphic, so only gamma' enters.  Both are integrated by a
hand-rolled adaptive Dormand-Prince 5(4) pair over plain 4-tuples of
complex entries (the 2x2 hot path does not justify numpy dispatch per
stage); step control is on the matrix max-norm and the determinant is
left untouched unless renormalization is requested, since raw det drift
is itself a diagnostic.

The Picard oracle computes I + sum_j lambda^j I_j, where I_j are iterated
integrals of the lambda-stripped coefficient, via the Legendre spectral
antiderivative matrix: values of level j-1 at the Gauss nodes are mapped
to values of level j by one matrix product.  It shares no code path with
the Runge-Kutta stepping.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._quad import QuadratureFailure, integration_matrix
from .geom import (EVAL_ERRORS, DomainError, StencilOutOfDomain, WeierstrassData,
                   fields_from_weierstrass, gmc_residual)

__all__ = [
    "PathSpec", "Wavefunction", "PoleClearanceViolated", "StepUnderflow",
    "IncompatibleSystem", "BranchAmbiguity", "QuadratureFailure",
    "reduced_coefficient", "integrate_reduced", "integrate_full",
    "picard_series", "gauge_matrix", "gauge_equivalence_residual",
]


class PoleClearanceViolated(ValueError):
    """Path passes a declared pole closer than the clearance radius."""


class StepUnderflow(ArithmeticError):
    """Adaptive step fell below the floor; usually an undeclared pole."""


class IncompatibleSystem(ValueError):
    """Full-system data fails the GMC compatibility probe near the path."""


class BranchAmbiguity(ArithmeticError):
    """Square-root branch tracking lost continuity (eta hit a zero)."""


@dataclass
class PathSpec:
    """Polyline in the complex plane; points[0] is the start.

    Declared poles are kept at least `clearance` away from every segment
    (validated, not rerouted).  max_step, when set, caps the arc length
    of a single integrator step.
    """
    points: tuple
    poles: tuple = ()
    clearance: float = 1e-2
    max_step: float = None

    def __post_init__(self):
        pts = tuple(complex(p) for p in self.points)
        if len(pts) < 2:
            raise ValueError("a path needs at least two points")
        self.points = pts
        self.poles = tuple(complex(p) for p in self.poles)

    @classmethod
    def line(cls, z0, z1, **kw):
        return cls(points=(z0, z1), **kw)

    def segments(self):
        return [(self.points[k], self.points[k + 1])
                for k in range(len(self.points) - 1)
                if self.points[k] != self.points[k + 1]]

    def length(self):
        return sum(abs(b - a) for a, b in self.segments())

    def validate(self):
        for a, b in self.segments():
            for p in self.poles:
                if _segment_distance(a, b, p) < self.clearance:
                    raise PoleClearanceViolated(
                        "segment %r -> %r passes pole %r within clearance %g"
                        % (a, b, p, self.clearance))


def _segment_distance(a, b, p):
    d = b - a
    L2 = (d * d.conjugate()).real
    if L2 == 0.0:
        return abs(p - a)
    t = ((p - a) * d.conjugate()).real / L2
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * d))


@dataclass
class Wavefunction:
    """2x2 solution value at a point; which is 'full' or 'reduced'."""
    value: np.ndarray
    at: complex
    lam: float
    which: str


# ---------------------------------------------------------------------------
# 4-tuple matrix helpers (row-major 2x2)

_ID4 = (1.0 + 0.0j, 0.0j, 0.0j, 1.0 + 0.0j)


def _mul4(a, b):
    a11, a12, a21, a22 = a
    b11, b12, b21, b22 = b
    return (a11 * b11 + a12 * b21, a11 * b12 + a12 * b22,
            a21 * b11 + a22 * b21, a21 * b12 + a22 * b22)


def _maxabs4(a):
    return max(abs(a[0]), abs(a[1]), abs(a[2]), abs(a[3]))


def _finite4(a):
    return all(math.isfinite(x.real) and math.isfinite(x.imag) for x in a)


def _det4(a):
    return a[0] * a[3] - a[1] * a[2]


def _to_matrix(a):
    return np.array([[a[0], a[1]], [a[2], a[3]]], dtype=complex)


# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 0.2, 0.3, 0.8, 8.0 / 9.0
_A21 = 0.2
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                                49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

_T_FLOOR = 1e-13
_MAX_STEPS = 200000


def _lc4(y, h, terms):
    # y + h * sum(c * k) entrywise over the 4-tuples
    r0, r1, r2, r3 = y
    for c, k in terms:
        ch = h * c
        r0 += ch * k[0]
        r1 += ch * k[1]
        r2 += ch * k[2]
        r3 += ch * k[3]
    return (r0, r1, r2, r3)


def _integrate_unit(cfun, y, tol, hmax=1.0, renormalize=False):
    """Advance dY/dt = C(t) Y from t=0 to t=1, Y a 4-tuple, C from cfun."""
    t = 0.0
    h = min(1.0, hmax)
    try:
        k1 = _mul4(cfun(0.0), y)
    except EVAL_ERRORS + (DomainError,) as exc:
        raise StepUnderflow("coefficient not evaluable at segment start: %s" % exc) from exc
    for _ in range(_MAX_STEPS):
        if t >= 1.0 - 1e-15:
            return y
        h = min(h, 1.0 - t)
        try:
            y2 = _lc4(y, h, ((_A21, k1),))
            k2 = _mul4(cfun(t + _C2 * h), y2)
            y3 = _lc4(y, h, ((_A31, k1), (_A32, k2)))
            k3 = _mul4(cfun(t + _C3 * h), y3)
            y4 = _lc4(y, h, ((_A41, k1), (_A42, k2), (_A43, k3)))
            k4 = _mul4(cfun(t + _C4 * h), y4)
            y5 = _lc4(y, h, ((_A51, k1), (_A52, k2), (_A53, k3), (_A54, k4)))
            k5 = _mul4(cfun(t + _C5 * h), y5)
            y6 = _lc4(y, h, ((_A61, k1), (_A62, k2), (_A63, k3), (_A64, k4), (_A65, k5)))
            k6 = _mul4(cfun(t + h), y6)
            ynew = _lc4(y, h, ((_B1, k1), (_B3, k3), (_B4, k4), (_B5, k5), (_B6, k6)))
            k7 = _mul4(cfun(t + h), ynew)
            bad = not (_finite4(ynew) and _finite4(k7))
        except EVAL_ERRORS + (DomainError,) as exc:
            bad = True
        if bad:
            h *= 0.25
            if h < _T_FLOOR:
                raise StepUnderflow("step underflow at t=%.6g (non-evaluable "
                                    "coefficients; undeclared pole?)" % t)
            continue
        errv = _lc4((0.0j, 0.0j, 0.0j, 0.0j), h,
                    ((_E1, k1), (_E3, k3), (_E4, k4), (_E5, k5), (_E6, k6), (_E7, k7)))
        err = _maxabs4(errv)
        scale = tol * max(1.0, _maxabs4(y), _maxabs4(ynew))
        if err <= scale:
            t += h
            y = ynew
            k1 = k7
            if renormalize:
                root = cmath.sqrt(_det4(y))
                y = (y[0] / root, y[1] / root, y[2] / root, y[3] / root)
                k1 = (k1[0] / root, k1[1] / root, k1[2] / root, k1[3] / root)
            if err == 0.0:
                h = min(5.0 * h, hmax)
            else:
                h = min(hmax, h * min(5.0, max(0.2, 0.9 * (scale / err) ** 0.2)))
        else:
            h *= max(0.2, 0.9 * (scale / err) ** 0.2)
            if h < _T_FLOOR:
                raise StepUnderflow("step underflow at t=%.6g (tol %g)" % (t, tol))
    raise StepUnderflow("step budget exhausted (%d steps)" % _MAX_STEPS)


# ---------------------------------------------------------------------------
# coefficient factories

def reduced_coefficient(data, z):
    """Coefficient matrix lambda eta^2 [[psi, -1], [psi^2, -psi]] at z.

    Traceless and of rank <= 1 (determinant 0) by construction.
    """
    eta_f, _, psi_f, _ = data.functions()
    z = complex(z)
    try:
        ev = eta_f(z)
        pv = psi_f(z)
    except EVAL_ERRORS as exc:
        raise DomainError("coefficient not evaluable at %r: %s" % (z, exc)) from exc
    w = data.lam * ev * ev
    return np.array([[w * pv, -w], [w * pv * pv, -w * pv]], dtype=complex)


def _reduced_segment_coef(data, a, b):
    eta_f, _, psi_f, _ = data.functions()
    lam = data.lam
    d = b - a

    def cfun(t):
        z = a + t * d
        ev = eta_f(z)
        pv = psi_f(z)
        w = lam * d * ev * ev
        return (w * pv, -w, w * pv * pv, -w * pv)

    return cfun


def _full_entries_fn(data, H):
    eta_f, deta_f, psi_f, dpsi_f = data.functions()
    lam = data.lam

    def entries(z):
        ev = eta_f(z)
        pv = psi_f(z)
        pc = pv.conjugate()
        m = (ev * ev.conjugate()).real * (1.0 + (pv * pc).real)   # e^{u/2}
        if not (m > 0.0 and math.isfinite(m)):
            raise DomainError("conformal factor degenerates at %r" % (z,))
        uz4 = 0.5 * (deta_f(z) / ev + pc * dpsi_f(z) / (1.0 + pv * pc))  # u_z/4
        off = -(ev * ev) * dpsi_f(z) / m                                 # Q e^{-u/2}
        u_mat = (uz4, -off, 0.5 * m * (lam + H), -uz4)
        vdag = (-uz4.conjugate(), 0.5 * m * (lam - H), off.conjugate(), uz4.conjugate())
        return u_mat, vdag

    return entries


def _full_segment_coef(entries, a, b):
    d = b - a
    dc = d.conjugate()

    def cfun(t):
        u_mat, vdag = entries(a + t * d)
        return (u_mat[0] * d + vdag[0] * dc, u_mat[1] * d + vdag[1] * dc,
                u_mat[2] * d + vdag[2] * dc, u_mat[3] * d + vdag[3] * dc)

    return cfun


def _sweep(data, path, tol, system, H=None, y0=_ID4, renormalize=False):
    """Shared propagation core; returns the final 4-tuple."""
    entries = None if system == "reduced" else _full_entries_fn(data, H if H is not None else data.lam)
    y = y0
    for a, b in path.segments():
        hmax = 1.0
        if path.max_step is not None:
            hmax = max(min(1.0, path.max_step / abs(b - a)), 1e-6)
        if system == "reduced":
            cfun = _reduced_segment_coef(data, a, b)
        else:
            cfun = _full_segment_coef(entries, a, b)
        y = _integrate_unit(cfun, y, tol, hmax=hmax, renormalize=renormalize)
    return y


def propagate(data, z_from, z_to, y0, tol=1e-10, system="reduced", H=None):
    """One straight hop z_from -> z_to from an arbitrary initial value.

    No pole validation or compatibility probing; building block for grid
    sweeps and finite-difference stencils.  y0 and the result are 4-tuples
    (row-major 2x2 entries).
    """
    if z_from == z_to:
        return y0
    path = PathSpec(points=(z_from, z_to))
    return _sweep(data, path, tol, system, H=H, y0=tuple(y0))


def integrate_reduced(data, path, tol=1e-10, renormalize=False):
    """Solve the reduced (holomorphic) system along the path, Psi(start) = I."""
    path.validate()
    y = _sweep(data, path, tol, "reduced", renormalize=renormalize)
    return Wavefunction(_to_matrix(y), at=path.points[-1], lam=data.lam, which="reduced")


def integrate_full(data, path, tol=1e-10, H=None, check_compatibility=True):
    """Solve the full system along the path, Phi(start) = I.

    The data is probed at segment endpoints and midpoints first: if the
    GMC residuals exceed 1e-4 there, the Lax pair is not flat and the
    integral is path-dependent, so IncompatibleSystem is raised.
    """
    path.validate()
    if check_compatibility:
        fields = fields_from_weierstrass(data, H=H)
        probes = []
        for a, b in path.segments():
            probes.extend((a, 0.5 * (a + b), b))
        for p in probes:
            try:
                r1, r2 = gmc_residual(fields, p)
            except (StencilOutOfDomain, DomainError) + EVAL_ERRORS as exc:
                raise IncompatibleSystem("fields not evaluable near path at %r: %s"
                                         % (p, exc)) from exc
            if max(abs(r1), abs(r2)) > 1e-4:
                raise IncompatibleSystem("GMC residual %.3e at %r exceeds 1e-4"
                                         % (max(abs(r1), abs(r2)), p))
    y = _sweep(data, path, tol, "full", H=H)
    return Wavefunction(_to_matrix(y), at=path.points[-1], lam=data.lam, which="full")


# ---------------------------------------------------------------------------
# Picard-series oracle

_PICARD_NODE_LADDER = (32, 48, 64, 96)


def picard_series(data, z, order, tol=1e-10):
    """I + sum_{j<=order} lambda^j I_j along the straight path z0 -> z.

    I_j are the iterated integrals of the lambda-stripped coefficient
    eta^2 [[psi, -1], [psi^2, -psi]].  Each refinement level evaluates the
    coefficient at Gauss-Legendre nodes and applies the spectral
    antiderivative matrix once per order; the node count is raised until
    two levels agree within tol.
    """
    if not (0 <= order <= 8):
        raise ValueError("order must be between 0 and 8, got %r" % (order,))
    z = complex(z)
    z0 = data.z0
    eye = np.eye(2, dtype=complex)
    if order == 0 or z == z0:
        return eye.copy()
    eta_f, _, psi_f, _ = data.functions()
    lam = data.lam
    scale = 0.5 * (z - z0)
    prev = None
    for n in _PICARD_NODE_LADDER:
        x, w, s_mat = integration_matrix(n)
        coef = np.empty((n, 2, 2), dtype=complex)
        try:
            for m in range(n):
                zeta = z0 + (x[m] + 1.0) * scale
                ev = eta_f(zeta)
                pv = psi_f(zeta)
                e2 = ev * ev
                coef[m, 0, 0] = e2 * pv
                coef[m, 0, 1] = -e2
                coef[m, 1, 0] = e2 * pv * pv
                coef[m, 1, 1] = -e2 * pv
        except EVAL_ERRORS as exc:
            raise QuadratureFailure("coefficient not evaluable on path: %s" % exc) from exc
        level = np.broadcast_to(eye, (n, 2, 2)).copy()
        total = eye.copy()
        lam_pow = 1.0
        for _ in range(order):
            integrand = np.einsum("mij,mjk->mik", coef, level)
            end_value = scale * np.tensordot(w, integrand, axes=(0, 0))
            level = scale * np.einsum("nm,mik->nik", s_mat, integrand)
            lam_pow *= lam
            total = total + lam_pow * end_value
        if prev is not None:
            drift = float(np.max(np.abs(total - prev)))
            if drift <= max(tol, 1e-14 * float(np.max(np.abs(total)))):
                return total
        prev = total
    raise QuadratureFailure("Picard refinement did not converge within the node ladder")


# ---------------------------------------------------------------------------
# gauge transform

def _principal_half_phase(wv):
    # the principal square root of the unit number wv/|wv| conj-reflected:
    # returns exp(i arg(wv)/2) with arg in (-pi, pi]
    return cmath.exp(0.5j * cmath.phase(wv))


def gauge_matrix(data, z, branch_seed=None, steps=64):
    """SU(2) gauge matrix

        M = (1 + psi conj(psi))^{-1/2} [[conj(s psi), s], [-conj(s), s psi]]

    with s = (eta/conj(eta))^{1/2}, the square-root branch continued along
    the straight path z0 -> z by nearest-phase tracking.  branch_seed,
    when given, selects the root at z0 (default: principal).

    M conjugates the full system at H = lambda into the reduced holomorphic
    one: M Phi solves dG/dz = lambda eta^2 [[psi,-1],[psi^2,-psi]] G with
    dG/dzbar = 0.  Verified against the fundamental solution of the full
    system at lambda = 0, whose inverse realizes the same gauge.
    """
    eta_f, _, psi_f, _ = data.functions()
    z = complex(z)
    z0 = data.z0
    try:
        e0 = eta_f(z0)
    except EVAL_ERRORS as exc:
        raise DomainError("eta not evaluable at base point %r: %s" % (z0, exc)) from exc
    if e0 == 0.0 or abs(e0) < 1e-300:
        raise BranchAmbiguity("eta vanishes at the base point %r" % (z0,))
    s = _principal_half_phase(e0 / e0.conjugate())
    if branch_seed is not None:
        seed = complex(branch_seed)
        if seed == 0.0:
            raise ValueError("branch_seed must be a nonzero phase")
        seed = seed / abs(seed)
        if abs(seed * seed - e0 / e0.conjugate()) > 1e-6:
            raise ValueError("branch_seed is not a square root of eta/conj(eta) at z0")
        s = seed
    s = _track_branch(eta_f, z0, z, s, steps)
    try:
        pv = psi_f(z)
    except EVAL_ERRORS as exc:
        raise DomainError("psi not evaluable at %r: %s" % (z, exc)) from exc
    return _gauge_from_parts(s, pv)


def _track_branch(eta_f, z_from, z_to, s, steps):
    """Continue s = (eta/conj(eta))^{1/2} from z_from to z_to.

    Nearest-phase selection per step; if the phase moves too fast to
    disambiguate, the stepping is refined, and a genuine zero crossing of
    eta raises BranchAmbiguity.
    """
    if z_to == z_from:
        return s
    while steps <= 4096:
        cur = s
        ok = True
        for k in range(1, steps + 1):
            zk = z_from + (z_to - z_from) * (k / steps)
            try:
                ev = eta_f(zk)
            except EVAL_ERRORS as exc:
                raise BranchAmbiguity("eta not evaluable at %r while tracking "
                                      "the root branch: %s" % (zk, exc)) from exc
            if abs(ev) < 1e-300:
                raise BranchAmbiguity("eta vanishes near %r; square-root branch "
                                      "undefined through a zero" % (zk,))
            cand = _principal_half_phase(ev / ev.conjugate())
            d_plus = abs(cand - cur)
            d_minus = abs(cand + cur)
            if min(d_plus, d_minus) > 1.2:
                # phase advanced close to pi/2 in one step: undersampled
                ok = False
                break
            cur = cand if d_plus <= d_minus else -cand
        if ok:
            return cur
        steps *= 2
    raise BranchAmbiguity("branch tracking failed to stabilize between %r and %r"
                          % (z_from, z_to))


def gauge_equivalence_residual(data, path, tol=1e-10, h=1e-4, H=None):
    """Numerical check of the gauge equivalence along a path.

    Propagates the full wavefunction Phi to the midpoint of every segment,
    forms G = M Phi M(z0)^{-1}, and measures by finite differences how
    well G solves the reduced system:

        r_z    = dG/dz G^{-1} - lambda eta^2 [[psi,-1],[psi^2,-psi]]
        r_zbar = dG/dzbar G^{-1}

    Returns a dict with the max residual norms, the worst M unitarity
    defect, and the worst tr/det drift between Phi^H Phi and G^H G.
    """
    path.validate()
    eta_f, _, psi_f, _ = data.functions()
    z0 = path.points[0]
    hval = data.lam if H is None else float(H)
    entries = _full_entries_fn(data, hval)

    m0 = gauge_matrix(data, z0)
    m0_inv = m0.conj().T          # unitary
    e0 = eta_f(z0)
    s = _principal_half_phase(e0 / e0.conjugate())

    y = _ID4
    prev = z0
    out = {"dz_residual": 0.0, "dzbar_residual": 0.0,
           "m_unitarity": 0.0, "trdet_drift": 0.0}
    for a, b in path.segments():
        mid = 0.5 * (a + b)
        for target in (a, mid):
            if target != prev:
                cfun = _full_segment_coef(entries, prev, target)
                y = _integrate_unit(cfun, y, tol)
                s = _track_branch(eta_f, prev, target, s, 16)
                prev = target
        phi_mid = _to_matrix(y)

        def g_at(w, y_mid=y, s_mid=s, zc=mid):
            yw = propagate(data, zc, w, y_mid, tol=tol, system="full", H=hval)
            sw = _track_branch(eta_f, zc, w, s_mid, 4)
            mw = _gauge_from_parts(sw, psi_f(w))
            return (mw @ _to_matrix(yw)) @ m0_inv

        ge = g_at(mid + h)
        gw = g_at(mid - h)
        gn = g_at(mid + 1j * h)
        gs = g_at(mid - 1j * h)
        gc = g_at(mid)
        gz = 0.5 * ((ge - gw) - 1j * (gn - gs)) / (2.0 * h)
        gzb = 0.5 * ((ge - gw) + 1j * (gn - gs)) / (2.0 * h)
        gc_inv = np.linalg.inv(gc)
        ev = eta_f(mid)
        pv = psi_f(mid)
        w2 = data.lam * ev * ev
        a_mat = np.array([[w2 * pv, -w2], [w2 * pv * pv, -w2 * pv]], dtype=complex)
        out["dz_residual"] = max(out["dz_residual"],
                                 float(np.max(np.abs(gz @ gc_inv - a_mat))))
        out["dzbar_residual"] = max(out["dzbar_residual"],
                                    float(np.max(np.abs(gzb @ gc_inv))))
        m_mid = _gauge_from_parts(s, pv)
        out["m_unitarity"] = max(out["m_unitarity"],
                                 float(np.max(np.abs(m_mid.conj().T @ m_mid - np.eye(2)))))
        p_full = phi_mid.conj().T @ phi_mid
        p_gauge = gc.conj().T @ gc
        out["trdet_drift"] = max(out["trdet_drift"],
                                 abs(np.trace(p_full) - np.trace(p_gauge)),
                                 abs(np.linalg.det(p_full) - np.linalg.det(p_gauge)))
    return out


def _gauge_from_parts(s, pv):
    denom = math.sqrt(1.0 + (pv * pv.conjugate()).real)
    sc = s.conjugate()
    return np.array([[sc * pv.conjugate(), s],
                     [-sc, s * pv]], dtype=complex) / denom
