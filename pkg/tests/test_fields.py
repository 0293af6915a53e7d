"""Reference fields, off-surface evaluation, surface traces, error metrics."""
import csv
import math

import numpy as np
import pytest

import londebye.fields as fields
from londebye.debye_core import LondonConfig, solve_scattering
from londebye.fields import (
    ReferenceSources,
    accuracy_errors,
    boundary_data_from_reference,
    default_targets,
    eval_fields,
    reference_fields,
    surface_traces,
    write_fields_csv,
)
from londebye.sphgrid import SphereGrid, tangential_synthesize, TangentialCoefficients


def _fd_curl(f, pts, h=1e-5):
    out = np.empty((len(pts), 3))
    for a, (b, c) in enumerate([(1, 2), (2, 0), (0, 1)]):
        eb, ec = np.zeros(3), np.zeros(3)
        eb[b] = h
        ec[c] = h
        dc_db = (f(pts + eb)[:, c] - f(pts - eb)[:, c]) / (2 * h)
        db_dc = (f(pts + ec)[:, b] - f(pts - ec)[:, b]) / (2 * h)
        out[:, a] = dc_db - db_dc
    return out


def _fd_div(f, pts, h=1e-5):
    out = np.zeros(len(pts))
    for a in range(3):
        e = np.zeros(3)
        e[a] = h
        out += (f(pts + e)[:, a] - f(pts - e)[:, a]) / (2 * h)
    return out


@pytest.fixture(scope="module")
def interior_pts():
    rng = np.random.default_rng(17)
    v = rng.normal(size=(20, 3))
    radii = 0.2 + 0.5 * rng.uniform(size=(20, 1))
    return radii * (v / np.linalg.norm(v, axis=1)[:, None])


class TestReferenceSources:
    def test_validation(self):
        with pytest.raises(ValueError):
            ReferenceSources(x_o=[0.5, 0, 0], x_i=[0.3, 0, 0], v_o=[1, 0, 0], lambda_L=1.0)
        with pytest.raises(ValueError):
            ReferenceSources(x_o=[0, 0, 2], x_i=[1.3, 0, 0], v_o=[1, 0, 0], lambda_L=1.0)
        with pytest.raises(ValueError):
            ReferenceSources(x_o=[0, 0, 2], x_i=[0.3, 0, 0], v_o=[0, 0, 0], lambda_L=1.0)

    def test_target_on_source_rejected(self):
        src = ReferenceSources.default(1.0)
        with pytest.raises(ValueError):
            reference_fields(src, np.array([[0.0, 0.0, 2.0]]))


class TestReferenceFields:
    def test_divergence_free_current(self, interior_pts):
        src = ReferenceSources.default(1.0)
        f = lambda p: reference_fields(src, p)["J"]
        div = _fd_div(f, interior_pts, h=1e-4)
        scale = np.max(np.linalg.norm(f(interior_pts), axis=1))
        assert np.max(np.abs(div)) / scale <= 1e-7

    @pytest.mark.parametrize("lam", [1.0, 0.5])
    def test_london_pair(self, interior_pts, lam):
        src = ReferenceSources.default(lam)
        fB = lambda p: reference_fields(src, p)["Btilde"]
        fJ = lambda p: reference_fields(src, p)["J"]
        ref = reference_fields(src, interior_pts)
        scale = max(
            np.max(np.linalg.norm(ref["J"], axis=1)),
            np.max(np.linalg.norm(ref["Btilde"], axis=1)),
        )
        r1 = _fd_curl(fB, interior_pts) - ref["J"] / lam
        r2 = _fd_curl(fJ, interior_pts) + ref["Btilde"] / lam
        assert np.max(np.abs(r1)) / scale <= 1e-6
        assert np.max(np.abs(r2)) / scale <= 1e-6

    def test_bp_inverse_square_decay(self):
        src = ReferenceSources.default(1.0)
        d = np.array([0.3, -0.5, 0.81])
        d /= np.linalg.norm(d)
        pts = src.x_i[None, :] + np.array([[10.0], [20.0]]) * d[None, :]
        mags = np.linalg.norm(reference_fields(src, pts)["Bp"], axis=1)
        assert mags[0] / mags[1] == pytest.approx(4.0, rel=0.05)


class TestEvalFields:
    def test_zero_solution_zero_fields(self, zero_sol24):
        pts = np.array([[0.2, 0.1, -0.3], [0.0, 0.5, 0.0]])
        ev = eval_fields(zero_sol24, pts, "interior")
        assert np.all(ev.Btilde == 0) and np.all(ev.J == 0)
        ex = eval_fields(zero_sol24, np.array([[2.0, 0, 0]]), "exterior")
        assert np.all(ex.Bp == 0)

    def test_exterior_monopole(self, zero_sol24):
        # q+ = Y_00 alone: B+ = grad S_0[q+] = -sqrt(4 pi) x / (4 pi |x|^3)
        sol = zero_sol24
        sol2 = fields.DebyeSolution.from_json(sol.to_json())
        sol2.q_plus.set(0, 0, 1.0)
        pts = np.array([[1.7, 0.4, -0.2], [0.0, 0.0, 3.0]])
        ev = eval_fields(sol2, pts, "exterior")
        r = np.linalg.norm(pts, axis=1)[:, None]
        expect = -math.sqrt(4 * math.pi) * pts / (4 * math.pi * r**3)
        np.testing.assert_allclose(ev.Bp, expect, rtol=1e-10, atol=1e-14)

    def test_london_residual_at_interior_points(self, sol40):
        rng = np.random.default_rng(99)
        v = rng.normal(size=(20, 3))
        pts = (0.2 + 0.5 * rng.uniform(size=(20, 1))) * (
            v / np.linalg.norm(v, axis=1)[:, None]
        )
        lam = sol40.config.lambda_L
        fB = lambda p: eval_fields(sol40, p, "interior").Btilde
        fJ = lambda p: eval_fields(sol40, p, "interior").J
        ev = eval_fields(sol40, pts, "interior")
        scale = max(
            np.max(np.linalg.norm(ev.J, axis=1)),
            np.max(np.linalg.norm(ev.Btilde, axis=1)),
        )
        r1 = _fd_curl(fB, pts, h=1e-4) - ev.J / lam
        r2 = _fd_curl(fJ, pts, h=1e-4) + ev.Btilde / lam
        assert np.max(np.abs(r1)) / scale <= 1e-5
        assert np.max(np.abs(r2)) / scale <= 1e-5

    def test_exclusion_flags(self, sol40):
        pts = np.array([[0.3, 0, 0], [0.9999, 0, 0], [1.2, 0, 0]])
        ev = eval_fields(sol40, pts, "interior")
        assert list(ev.valid) == [True, False, False]
        assert np.all(np.isnan(ev.Btilde[1]))
        assert np.all(np.isfinite(ev.Btilde[0]))

    def test_bad_side_rejected(self, sol40):
        with pytest.raises(ValueError):
            eval_fields(sol40, np.zeros((1, 3)), "outside")


class TestSurfaceConsistency:
    def test_boundary_continuity(self, sol40, src40, grid40):
        # lam * Btilde- minus B+ reproduces the incident field on the surface
        tr = surface_traces(sol40)
        grid = tr["grid"]
        B_in, _ = boundary_data_from_reference(src40, grid)
        lam = sol40.config.lambda_L
        resid = lam * tr["Btilde"] - tr["Bp"] - B_in
        num = math.sqrt(float(np.real(grid.integrate(np.einsum("ijk,ijk->ij", resid, resid)))))
        assert num / sol40.density_norm() < 1e-6

    def test_current_normal_component_vanishes(self, driven_sol24):
        tr = surface_traces(driven_sol24)
        grid = tr["grid"]
        jn = np.einsum("ijk,ijk->ij", tr["J"], grid.normals)
        scale = math.sqrt(float(np.real(grid.integrate(np.einsum("ijk,ijk->ij", tr["J"], tr["J"])))))
        assert math.sqrt(float(np.real(grid.integrate(jn * jn)))) / scale < 1e-8

    def test_solve_sees_only_three_functionals(self, src40):
        # adding a rotational (divergence-free) tangential component to B_in
        # changes none of the three projected data functionals, hence not the
        # solution: the full tangential trace is never imposed
        n_max = 16
        cfg = LondonConfig(lambda_L=1.0, n_max=n_max)
        grid = SphereGrid(n_max)
        B_in, J_in_n = boundary_data_from_reference(src40, grid)
        tc = TangentialCoefficients.zeros(n_max)
        tc.h[3, 2 + n_max] = 0.7  # pure rotated Hodge piece
        B_in2 = B_in + np.real(tangential_synthesize(tc, grid))
        s1 = solve_scattering(cfg, grid, B_in, J_in_n)
        s2 = solve_scattering(cfg, grid, B_in2, J_in_n)
        for name, tab in s1.tables().items():
            np.testing.assert_allclose(s2.tables()[name].c, tab.c, atol=1e-10)


class TestAccuracyErrors:
    def test_full_pipeline(self, sol40, src40):
        t_int, t_ext = default_targets(0)
        eps1, eps2, M = accuracy_errors(sol40, src40, t_int, t_ext)
        assert eps1 <= 1e-8
        assert eps2 <= 1e-6
        assert M > 0

    def test_zero_density_norm_rejected(self, zero_sol24, src40):
        t_int, t_ext = default_targets(0)
        with pytest.raises(ZeroDivisionError):
            accuracy_errors(zero_sol24, src40, t_int, t_ext)

    def test_perturbation_changes_eps1_by_delta_over_M(
        self, sol40, src40, monkeypatch
    ):
        t_int, t_ext = default_targets(0)
        eps1_base, _, M = accuracy_errors(sol40, src40, t_int, t_ext)
        delta = 1e-3
        real_ref = fields.reference_fields

        def perturbed(src, targets, _real=real_ref):
            out = _real(src, targets)
            t = np.atleast_2d(targets)
            if len(t) == len(t_ext) and np.allclose(t, t_ext):
                out["Bp"] = out["Bp"].copy()
                out["Bp"][0, 0] += delta
            return out

        monkeypatch.setattr(fields, "reference_fields", perturbed)
        eps1_pert, _, _ = accuracy_errors(sol40, src40, t_int, t_ext)
        # errors add in quadrature; the base error is ~1e-15 and negligible
        assert eps1_pert == pytest.approx(delta / M, rel=1e-6)

    def test_default_targets_deterministic(self):
        a_int, a_ext = default_targets(5)
        b_int, b_ext = default_targets(5)
        np.testing.assert_array_equal(a_int, b_int)
        np.testing.assert_array_equal(a_ext, b_ext)
        r_int = np.linalg.norm(a_int, axis=1)
        r_ext = np.linalg.norm(a_ext, axis=1)
        assert np.all((r_int >= 0.2) & (r_int <= 0.6))
        assert np.all((r_ext >= 1.5) & (r_ext <= 2.5))


class TestCsv:
    def test_header_and_values(self, tmp_path):
        pts = np.array([[1.5, 0.0, 0.0], [0.0, 2.0, 0.0]])
        B = np.array([[1e-3, 0.0, -2e-3], [0.5, 0.25, 0.125]])
        J = np.zeros_like(B)
        path = tmp_path / "f.csv"
        write_fields_csv(path, pts, B, J)
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["x", "y", "z", "Bx", "By", "Bz", "Jx", "Jy", "Jz"]
        assert len(rows) == 3
        assert float(rows[1][3]) == 1e-3

    def test_without_current(self, tmp_path):
        path = tmp_path / "b.csv"
        write_fields_csv(path, np.zeros((1, 3)), np.ones((1, 3)))
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["x", "y", "z", "Bx", "By", "Bz"]
