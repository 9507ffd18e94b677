"""End-to-end operator application with the auxiliary-subtraction path."""

import math

import numpy as np
import pytest
from scipy.special import erf

from rfspectral.basis import lambda_k, make_grid
from rfspectral.closedform import OperatorKind, frac_lap_lambda, reference_operator
from rfspectral.operators import (
    DEFAULT_AUX,
    AuxDecomposition,
    apply_periodic,
    apply_reference,
    apply_with_aux,
    sweep_errors,
    write_nodal_csv,
)
from rfspectral.opmatrix import build_base_matrix, scale_to_operator


@pytest.fixture(scope="module")
def base_62():
    return build_base_matrix(0.62, 64, 50)


class TestApplyPeriodic:
    def test_constant_function(self, base_62):
        grid = make_grid(64, 1.0)
        matrix = scale_to_operator(base_62, OperatorKind.RIESZ_FELLER, 0.3, 1.0)
        out = apply_periodic(np.ones(64), matrix, grid)
        assert np.max(np.abs(out)) == 0.0

    def test_single_mode(self, base_62):
        l_scale = 1.7
        grid = make_grid(64, l_scale)
        matrix = scale_to_operator(base_62, OperatorKind.RIESZ_FELLER, 0.0, l_scale)
        samples = np.real(lambda_k(grid.x_nodes, 1, l_scale))
        out = apply_periodic(samples, matrix, grid)
        g1 = make_grid(64, 1.0)
        expected = -np.array(
            [frac_lap_lambda(0.62, 1, x).real for x in g1.x_nodes]
        ) / l_scale ** 0.62
        assert np.max(np.abs(out.real - expected)) < 1e-11
        assert np.max(np.abs(out.imag)) < 1e-11

    def test_dimension_mismatch(self, base_62):
        grid = make_grid(64, 1.0)
        matrix = scale_to_operator(base_62, OperatorKind.FRAC_LAPLACIAN, 0.0, 1.0)
        with pytest.raises(ValueError):
            apply_periodic(np.ones(32), matrix, grid)


class TestApplyWithAux:
    def test_erf_riesz_feller(self):
        report = apply_reference("erf", OperatorKind.RIESZ_FELLER, 0.62, 0.49, 256, 1.1, 100)
        assert report.linf_error < 1e-12

    def test_arctan_self_aux_is_exact(self, base_62):
        grid = make_grid(64, 1.3)
        matrix = scale_to_operator(base_62, OperatorKind.WEYL_RIGHT, 0.0, 1.3)
        report = apply_with_aux(
            np.arctan, DEFAULT_AUX["arctan"], matrix, grid, exact="arctan"
        )
        # w vanishes identically, so the numeric part contributes nothing.
        assert report.linf_error < 1e-14

    def test_log_growth_function(self):
        report = apply_reference(
            "log1psq", OperatorKind.RIESZ_FELLER, 1.12, 0.83, 256, 30.0, 100
        )
        assert report.linf_error < 1.2e-3

    def test_linearity(self, base_62):
        l_scale = 1.4
        grid = make_grid(64, l_scale)
        matrix = scale_to_operator(base_62, OperatorKind.WEYL_LEFT_NEG, 0.0, l_scale)
        rng = np.random.default_rng(6)
        u = rng.normal(size=64)
        w = rng.normal(size=64)
        a, b = 1.7, -0.4
        combined = apply_periodic(a * u + b * w, matrix, grid)
        parts = a * apply_periodic(u, matrix, grid) + b * apply_periodic(w, matrix, grid)
        scale = max(1.0, np.max(np.abs(parts)))
        assert np.max(np.abs(combined - parts)) < 1e-12 * scale

    def test_realness(self):
        report = apply_reference("erf", OperatorKind.FRAC_LAPLACIAN, 1.37, 0.0, 128, 2.0, 100)
        assert np.max(np.abs(report.approx.imag)) < 1e-11

    def test_oracle_agreement_interior_nodes(self):
        from rfspectral.oracle import QuadratureConfig, quad_operator

        report = apply_reference("erf", OperatorKind.RIESZ_FELLER, 0.4, 0.2, 128, 1.5, 100)
        grid = report.grid
        cfg = QuadratureConfig.for_function(0.4, u_sup=1.0, abs_tol=1e-8, rel_tol=1e-8)
        du = lambda x: 2.0 / math.sqrt(math.pi) * math.exp(-x * x)
        for j in np.linspace(40, 88, 5).astype(int):
            x = float(grid.x_nodes[j])
            quad_val = quad_operator(
                OperatorKind.RIESZ_FELLER, 0.4, 0.2, lambda t: float(erf(t)), x,
                cfg, du=du,
            )
            assert abs(report.approx[j].real - quad_val) < 1e-6


class TestAuxDecomposition:
    def test_limits_balance(self):
        decomp = DEFAULT_AUX["erf"]
        for x in (1e8, -1e8):
            w = erf(x) - decomp.aux_values(x)
            assert abs(w) < 1e-6

    def test_custom_aux_operator_scaling(self):
        decomp = AuxDecomposition(aux=DEFAULT_AUX["erf"].aux, scale=-2.0, offset=5.0)
        x = np.array([0.3, -1.2])
        got = decomp.aux_operator(OperatorKind.FRAC_LAPLACIAN, 0.62, 0.0, x)
        expected = -2.0 * reference_operator(
            "arctan", OperatorKind.FRAC_LAPLACIAN, 0.62, 0.0, x
        )
        assert np.allclose(got, expected, rtol=1e-15)


class TestSweep:
    def test_underresolved_basis_has_large_errors(self):
        errors = sweep_errors(
            "erf", OperatorKind.RIESZ_FELLER, 1.37, 0.58, [8],
            [0.5 * i for i in range(1, 11)], 100,
        )
        assert np.min(errors) > 1e-3

    def test_shape_and_threading(self):
        serial = sweep_errors(
            "erf", OperatorKind.FRAC_LAPLACIAN, 0.62, 0.0, [16, 32], [1.0, 2.0], 20
        )
        threaded = sweep_errors(
            "erf", OperatorKind.FRAC_LAPLACIAN, 0.62, 0.0, [16, 32], [1.0, 2.0], 20,
            jobs=2,
        )
        assert serial.shape == (2, 2)
        assert np.array_equal(serial, threaded)


class TestCsv:
    def test_nodal_csv_layout(self, tmp_path):
        path = tmp_path / "out.csv"
        x = np.array([1.5, -0.25])
        approx = np.array([1.0 + 2.0j, 3.0 + 0.0j])
        exact = np.array([1.0, 3.5])
        write_nodal_csv(path, x, approx, exact)
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "x,approx_re,approx_im,exact_re,exact_im,abs_err"
        first = lines[1].split(",")
        assert float(first[0]) == 1.5
        assert float(first[5]) == abs(approx[0] - exact[0])
