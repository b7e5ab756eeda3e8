"""Tests for path handling, wavefunction integration, Picard series, gauge."""

import cmath
import math
import unittest

import numpy as np

from solsurf.expr import parse
from solsurf.geom import WeierstrassData
from solsurf.lsp import (PathSpec, PoleClearanceViolated, BranchAmbiguity,
                         IncompatibleSystem, Wavefunction, propagate,
                         integrate_reduced, integrate_full, picard_series,
                         gauge_matrix, gauge_equivalence_residual)


def make_data(eta, psi, lam, z0=0j):
    return WeierstrassData(eta=parse(eta), psi=parse(psi), z0=z0, lam=lam)


class TestPathSpec(unittest.TestCase):
    def test_needs_two_points(self):
        with self.assertRaises(ValueError):
            PathSpec(points=(1.0,))

    def test_line_and_length(self):
        p = PathSpec.line(0.0, 3 + 4j)
        self.assertEqual(p.points, (0j, 3 + 4j))
        self.assertAlmostEqual(p.length(), 5.0)

    def test_segments_skip_repeats(self):
        p = PathSpec(points=(0.0, 1.0, 1.0, 1 + 1j))
        self.assertEqual(p.segments(), [(0j, 1 + 0j), (1 + 0j, 1 + 1j)])

    def test_pole_clearance(self):
        p = PathSpec(points=(0.0, 2.0), poles=(1 + 0.001j,))
        with self.assertRaises(PoleClearanceViolated):
            p.validate()
        # same pole, generous margin: fine
        PathSpec(points=(0.0, 2.0), poles=(1 + 0.5j,)).validate()


class TestReducedIntegration(unittest.TestCase):
    DATA = make_data("1+0.3*z", "z^2", 0.8)

    def test_metadata(self):
        wf = integrate_reduced(self.DATA, PathSpec.line(0.0, 0.7 + 0.2j))
        self.assertIsInstance(wf, Wavefunction)
        self.assertEqual(wf.at, 0.7 + 0.2j)
        self.assertEqual(wf.lam, 0.8)
        self.assertEqual(wf.which, "reduced")

    def test_determinant_preserved(self):
        # trace-free coefficient, so det Psi = 1 along any path
        wf = integrate_reduced(self.DATA, PathSpec.line(0.0, 1.5 + 0.9j))
        self.assertLess(abs(np.linalg.det(wf.value) - 1.0), 1e-10)

    def test_path_independence(self):
        # holomorphic system: straight path and a detour must agree
        end = 0.8 + 0.6j
        straight = integrate_reduced(self.DATA, PathSpec.line(0.0, end))
        bent = integrate_reduced(self.DATA, PathSpec(points=(0.0, 0.8, end)))
        detour = integrate_reduced(self.DATA, PathSpec(points=(0.0, -0.3j, 1.1j, end)))
        self.assertLess(np.max(np.abs(straight.value - bent.value)), 1e-9)
        self.assertLess(np.max(np.abs(straight.value - detour.value)), 1e-9)

    def test_propagate_round_trip(self):
        y = propagate(self.DATA, 0.0, 1 + 1j, (1, 0, 0, 1))
        back = propagate(self.DATA, 1 + 1j, 0.0, y)
        for got, want in zip(back, (1, 0, 0, 1)):
            self.assertLess(abs(got - want), 1e-9)


class TestFullIntegration(unittest.TestCase):
    DATA = make_data("1", "z", 1.0)

    def test_determinant_preserved(self):
        wf = integrate_full(self.DATA, PathSpec.line(0.0, 0.6 + 0.4j))
        self.assertEqual(wf.which, "full")
        self.assertLess(abs(np.linalg.det(wf.value) - 1.0), 1e-10)

    def test_incompatible_mean_curvature(self):
        # H != lambda makes the pair non-flat, so integration must refuse
        with self.assertRaises(IncompatibleSystem):
            integrate_full(self.DATA, PathSpec.line(0.0, 0.5), H=0.3)

    def test_compatibility_probe_can_be_skipped(self):
        wf = integrate_full(self.DATA, PathSpec.line(0.0, 0.25), H=0.3,
                            check_compatibility=False)
        self.assertEqual(wf.at, 0.25 + 0j)

    def test_round_trip(self):
        y = propagate(self.DATA, 0.0, 0.5 + 0.3j, (1, 0, 0, 1), system="full")
        back = propagate(self.DATA, 0.5 + 0.3j, 0.0, y, system="full")
        for got, want in zip(back, (1, 0, 0, 1)):
            self.assertLess(abs(got - want), 1e-9)


class TestPicardSeries(unittest.TestCase):
    def test_order_zero_is_identity(self):
        data = make_data("1+0.2*z", "z^2", 0.1)
        self.assertTrue(np.array_equal(picard_series(data, 2.0, 0), np.eye(2)))

    def test_order_bounds(self):
        data = make_data("1", "z", 0.1)
        for bad in (-1, 9):
            with self.assertRaises(ValueError):
                picard_series(data, 1.0, bad)

    def test_first_order_closed_form(self):
        # eta = 1, psi = z: the first iterated integral over [0, 1] is
        # [[1/2, -1], [1/3, -1/2]], and order 1 truncates right after it
        lam = 1e-3
        data = make_data("1", "z", lam)
        got = picard_series(data, 1.0, 1)
        want = np.eye(2) + lam * np.array([[0.5, -1.0], [1.0 / 3.0, -0.5]])
        self.assertLess(np.max(np.abs(got - want)), 1e-13)

    def test_converges_to_integrated_solution(self):
        data = make_data("1+0.2*z", "z^2", 0.025)
        ref = integrate_reduced(data, PathSpec.line(0.0, 3.0), tol=1e-13).value
        err6 = np.max(np.abs(picard_series(data, 3.0, 6) - ref))
        err2 = np.max(np.abs(picard_series(data, 3.0, 2) - ref))
        self.assertLess(err6, 1e-8)
        self.assertGreater(err2, err6)


class TestGaugeTransform(unittest.TestCase):
    DATA = make_data("1+0.2*z", "z^2", 0.7)

    def test_unitary(self):
        for z in (0.5 + 0.4j, -0.3 + 0.2j, 1.1):
            m = gauge_matrix(self.DATA, z)
            self.assertLess(np.max(np.abs(m.conj().T @ m - np.eye(2))), 1e-12)
            self.assertLess(abs(np.linalg.det(m) - 1.0), 1e-12)

    def test_branch_seed_flips_sign(self):
        m_plus = gauge_matrix(self.DATA, 0.5 + 0.4j)
        m_minus = gauge_matrix(self.DATA, 0.5 + 0.4j, branch_seed=-1.0)
        self.assertTrue(np.allclose(m_minus, -m_plus, atol=1e-12))
        with self.assertRaises(ValueError):
            gauge_matrix(self.DATA, 0.5, branch_seed=1j)

    def test_branch_continuation_winds(self):
        # eta = exp(2 i z) on the real axis: eta/conj(eta) = exp(4 i x),
        # whose continuously tracked square root reaches -1 at x = pi/2
        # even though the principal root there is +1
        data = make_data("exp(2*i*z)", "z", 1.0)
        z = 0.5 * math.pi
        m = gauge_matrix(data, z)
        s = m[0, 1] * math.sqrt(1.0 + abs(z) ** 2)
        self.assertLess(abs(s + 1.0), 1e-6)

    def test_zero_crossing_refused(self):
        data = make_data("z-1", "z", 1.0)
        with self.assertRaises(BranchAmbiguity):
            gauge_matrix(data, 2.0)

    def test_equivalence_residual_three_paths(self):
        end = 0.5 + 0.4j
        paths = [PathSpec.line(0.0, end),
                 PathSpec(points=(0.0, 0.5, end)),
                 PathSpec(points=(0.0, -0.2j, end))]
        for path in paths:
            res = gauge_equivalence_residual(self.DATA, path)
            self.assertLess(res["dz_residual"], 1e-4, res)
            self.assertLess(res["dzbar_residual"], 1e-4, res)
            self.assertLess(res["m_unitarity"], 1e-12, res)
            self.assertLess(res["trdet_drift"], 1e-8, res)


if __name__ == "__main__":
    unittest.main()
