"""Apply a supported operator to a function on the real line.

Functions whose limits at -inf and +inf differ are handled by subtracting a
closed-form auxiliary first, so that the remainder maps to a periodic
function of s; the operator of the auxiliary is added back exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import KRASNY_EPS, SpectralGrid, analyze, make_grid
from .closedform import (
    ARCTAN,
    CLOSED_FORMS,
    ClosedFormFunction,
    OperatorKind,
    reference_operator,
)
from .opmatrix import OperatorMatrix, apply as matrix_apply, build_base_matrix, scale_to_operator


@dataclass(frozen=True)
class AuxDecomposition:
    """Split u = w + offset + scale * aux, with aux a registered closed-form
    function chosen so that w has equal limits at both infinities."""

    aux: ClosedFormFunction
    scale: float
    description: str = ""
    offset: float = 0.0

    def aux_values(self, x):
        return self.offset + self.scale * self.aux.value(x)

    def aux_operator(self, kind: OperatorKind, alpha: float, gamma: float, x):
        # The additive offset is annihilated by every supported operator.
        return self.scale * reference_operator(self.aux, kind, alpha, gamma, x)


@dataclass(frozen=True)
class ApplyReport:
    grid: SpectralGrid
    approx: np.ndarray
    exact: np.ndarray | None = None
    linf_error: float | None = None


# Aux decompositions making U(s) periodic for the shipped reference
# functions: erf shares arctan's +-limits up to the factor 2/pi; the even
# log function needs no correction.
DEFAULT_AUX: dict[str, AuxDecomposition | None] = {
    "erf": AuxDecomposition(
        aux=ARCTAN, scale=2.0 / math.pi, description="erf - (2/pi) arctan"
    ),
    "arctan": AuxDecomposition(aux=ARCTAN, scale=1.0, description="arctan itself"),
    "log1psq": None,
}


def apply_periodic(samples, matrix: OperatorMatrix, grid: SpectralGrid,
                   krasny_eps: float = KRASNY_EPS) -> np.ndarray:
    """Operator values at the nodes for samples whose mapped function is
    periodic: analyze, filter, multiply by the operator matrix."""
    samples = np.asarray(samples)
    if samples.shape != (grid.n,) or matrix.n != grid.n:
        raise ValueError(
            f"size mismatch: samples {samples.shape}, matrix {matrix.n}, "
            f"grid {grid.n}"
        )
    coeffs = analyze(samples, grid, krasny_eps=krasny_eps)
    return matrix_apply(matrix, coeffs)


def apply_with_aux(
    u,
    decomp: AuxDecomposition | None,
    matrix: OperatorMatrix,
    grid: SpectralGrid,
    exact=None,
) -> ApplyReport:
    """Operator of u via the auxiliary split; u may be a callable on x or an
    array of node samples.  `exact` (callable or array) fills the report's
    error field; strings name a registered closed form."""
    x = grid.x_nodes
    samples = u(x) if callable(u) else np.asarray(u)
    if decomp is not None:
        w = samples - decomp.aux_values(x)
        approx = apply_periodic(w, matrix, grid) + decomp.aux_operator(
            matrix.kind, matrix.alpha, matrix.gamma, x
        )
    else:
        approx = apply_periodic(samples, matrix, grid)
    exact_values = None
    linf = None
    if exact is not None:
        if isinstance(exact, str):
            exact_values = reference_operator(
                exact, matrix.kind, matrix.alpha, matrix.gamma, x
            )
        elif callable(exact):
            exact_values = exact(x)
        else:
            exact_values = np.asarray(exact)
        linf = float(np.max(np.abs(approx - exact_values)))
    return ApplyReport(grid=grid, approx=approx, exact=exact_values, linf_error=linf)


def apply_reference(
    func_name: str,
    kind: OperatorKind,
    alpha: float,
    gamma: float,
    n: int,
    l_scale: float,
    l_lim: int,
    base: OperatorMatrix | None = None,
) -> ApplyReport:
    """Full pipeline for one of the registered reference functions, returning
    nodal approximation, exact values and the max-norm error."""
    func = CLOSED_FORMS[func_name]
    if base is None:
        base = build_base_matrix(alpha, n, l_lim)
    matrix = scale_to_operator(base, kind, gamma, l_scale)
    grid = make_grid(n, l_scale)
    return apply_with_aux(
        lambda x: func.value(x),
        DEFAULT_AUX[func_name],
        matrix,
        grid,
        exact=func_name,
    )


def sweep_errors(
    func_name: str,
    kind: OperatorKind,
    alpha: float,
    gamma: float,
    n_list,
    l_list,
    l_lim: int,
    jobs: int = 1,
):
    """Max-norm error for every (N, L) cell; returns an array of shape
    (len(l_list), len(n_list)) with rows indexed by L."""
    n_list = list(n_list)
    l_list = list(l_list)
    errors = np.empty((len(l_list), len(n_list)))

    def run_column(col, n):
        base = build_base_matrix(alpha, n, l_lim)
        for row, l_scale in enumerate(l_list):
            report = apply_reference(
                func_name, kind, alpha, gamma, n, l_scale, l_lim, base=base
            )
            errors[row, col] = report.linf_error

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(lambda cn: run_column(*cn), enumerate(n_list)))
    else:
        for col, n in enumerate(n_list):
            run_column(col, n)
    return errors


def write_nodal_csv(path, x, approx, exact=None):
    """CSV with one row per node: x, re/im of the approximation, re/im of the
    exact value and the absolute error, at full double precision."""
    approx = np.asarray(approx, dtype=np.complex128)
    with open(path, "w") as fh:
        fh.write("x,approx_re,approx_im,exact_re,exact_im,abs_err\n")
        for j in range(len(x)):
            if exact is None:
                ex_re, ex_im, err = math.nan, math.nan, math.nan
            else:
                ex = complex(exact[j])
                ex_re, ex_im = ex.real, ex.imag
                err = abs(approx[j] - ex)
            fh.write(
                f"{x[j]:.17g},{approx[j].real:.17g},{approx[j].imag:.17g},"
                f"{ex_re:.17g},{ex_im:.17g},{err:.17g}\n"
            )
