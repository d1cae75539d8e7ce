"""Fourth-order Neumann problem solved as a cascade of two Poisson solves.

The problem: find u with bilaplacian(u) = f in the domain, where the
boundary carries the Laplacian trace g and the Laplacian flux h,

    laplace(u) = g       on the boundary,
    d(laplace u)/dn = h  on the boundary.

Setting sigma = laplace(u) decouples the system triangularly: sigma
solves a Dirichlet Poisson problem with data (f, g), and the zero-trace
representative s of the solution family solves a second Dirichlet
problem with source sigma. The flux datum h never enters either solve;
it is consumed only by the solvability diagnostics. That is exactly the
well-posedness structure of the continuous problem: h is constrained by
f and g through the compatibility conditions rather than imposed.

Diagnostics:

* ``compatibility_residual``: r(eta) = (f, eta) + <g, d(eta)/dn> -
  <h, eta> over a basis of harmonic polynomials eta; all residuals vanish
  for compatible data.
* ``flux_mismatch``: boundary L2 distance between the recovered flux of
  sigma_h and the datum h.
* ``weak_form_residual``: the defect of sigma_h in the weak formulation
  tested against laplacians of doubly-clamped polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .fem import (
    FeSpace,
    ScalarField,
    _coerce_values,
    boundary_geometry,
    default_boundary_rule,
    field_values,
    integrate,
    quad_points,
    triangle_quadrature,
)
from .mesh import DomainTag
from .poisson import normal_flux, solve_dirichlet
from .polynomials import HarmonicPolynomial, Polynomial2D, harmonic_basis

__all__ = [
    "NeumannProblem",
    "CascadeDiagnostics",
    "CascadeSolution",
    "CompatibilityError",
    "solve_neumann",
    "compatibility_residual",
    "flux_mismatch",
    "weak_form_residual",
    "DEFAULT_HARMONIC_DEGREE",
    "DEFAULT_STRICT_TOL",
]

DEFAULT_HARMONIC_DEGREE = 3
DEFAULT_STRICT_TOL = 1e-3

# Data terms are smooth but not polynomial; a fixed high order keeps the
# diagnostic quadrature error far below discretization error.
DIAGNOSTIC_VOLUME_ORDER = 6


@dataclass(frozen=True)
class NeumannProblem:
    """Data triple of the fourth-order Neumann problem.

    ``f`` lives on the domain; ``g`` (Laplacian trace) and ``h``
    (Laplacian flux) live on the boundary. All are callables over numpy
    coordinate arrays, or constants.
    """

    f: Callable | float
    g: Callable | float
    h: Callable | float


@dataclass(frozen=True)
class CascadeDiagnostics:
    """Solvability diagnostics attached to a cascade solution.

    ``compat_residuals`` follows the harmonic basis ordering (constant,
    then real/imaginary pairs by increasing degree).
    """

    compat_residuals: np.ndarray
    flux_mismatch: float
    cg_iterations: tuple[int, int]

    @property
    def compat_max(self) -> float:
        return float(np.abs(self.compat_residuals).max())


@dataclass(frozen=True)
class CascadeSolution:
    """Both fields of the triangular cascade plus diagnostics.

    ``sigma_h`` approximates the Laplacian of the solution; ``s_h`` is
    the zero-trace representative of the solution family (solutions are
    determined only up to harmonic functions matching the data). The
    originating problem rides along so flux diagnostics can be recomputed
    against perturbed data.
    """

    sigma_h: ScalarField
    s_h: ScalarField
    problem: NeumannProblem
    diagnostics: CascadeDiagnostics


class CompatibilityError(RuntimeError):
    """Raised by strict solves when the data fail the compatibility test."""

    def __init__(self, residuals: np.ndarray, tol: float):
        self.residuals = np.asarray(residuals)
        self.tol = tol
        worst = float(np.abs(self.residuals).max())
        super().__init__(
            f"compatibility residual {worst:.6e} exceeds strict tolerance {tol:.1e}"
        )


def compatibility_residual(
    space: FeSpace,
    problem: NeumannProblem,
    basis: Sequence[HarmonicPolynomial],
) -> np.ndarray:
    """Residuals r(eta) = (f, eta) + <g, d(eta)/dn> - <h, eta> for each
    harmonic test polynomial eta.

    For data that actually belong to one fourth-order Neumann problem all
    residuals vanish; the values returned here differ from zero only by
    quadrature error. A constant perturbation of h shifts r(1) by minus
    the boundary length.
    """
    vol_rule = triangle_quadrature(DIAGNOSTIC_VOLUME_ORDER)
    x, y = quad_points(space.mesh, vol_rule)
    f_vals = _coerce_values(problem.f(x, y) if callable(problem.f) else problem.f, x.shape)

    b_rule = default_boundary_rule()
    _, bx, by, lengths, normals = boundary_geometry(space.mesh, b_rule)
    g_vals = _coerce_values(problem.g(bx, by) if callable(problem.g) else problem.g, bx.shape)
    h_vals = _coerce_values(problem.h(bx, by) if callable(problem.h) else problem.h, bx.shape)

    out = np.empty(len(basis))
    for k, eta in enumerate(basis):
        volume = integrate(space.mesh, vol_rule, f_vals * eta(x, y))
        ex, ey = eta.grad()
        dn_eta = ex(bx, by) * normals[:, 0:1] + ey(bx, by) * normals[:, 1:2]
        g_term = np.einsum("eq,q,e->", g_vals * dn_eta, b_rule.weights, lengths)
        h_term = np.einsum("eq,q,e->", h_vals * eta(bx, by), b_rule.weights, lengths)
        out[k] = volume + g_term - h_term
    return out


def solve_neumann(
    space: FeSpace,
    problem: NeumannProblem,
    *,
    harmonic_degree: int = DEFAULT_HARMONIC_DEGREE,
    strict: bool = False,
    strict_tol: float = DEFAULT_STRICT_TOL,
    rel_tol: float = 1e-10,
    max_iter: int | None = None,
) -> CascadeSolution:
    """Solve the fourth-order Neumann problem by the triangular cascade.

    First Dirichlet solve: laplace(sigma) = f with trace g. Second:
    laplace(s) = sigma_h with zero trace. The flux datum h is used only
    for diagnostics, so solutions for two problems differing in h alone
    are identical bit for bit.

    With ``strict=True`` the solve raises CompatibilityError before any
    linear system is touched if the largest compatibility residual
    exceeds ``strict_tol``.
    """
    basis = harmonic_basis(harmonic_degree)
    residuals = compatibility_residual(space, problem, basis)
    if strict and float(np.abs(residuals).max()) > strict_tol:
        raise CompatibilityError(residuals, strict_tol)

    sigma_h = solve_dirichlet(space, problem.f, problem.g, rel_tol=rel_tol, max_iter=max_iter)
    s_h = solve_dirichlet(space, sigma_h, 0.0, rel_tol=rel_tol, max_iter=max_iter)

    flux = normal_flux(space, sigma_h, problem.f)
    mismatch = flux.l2_mismatch(problem.h)
    diagnostics = CascadeDiagnostics(
        compat_residuals=residuals,
        flux_mismatch=mismatch,
        cg_iterations=(sigma_h.solver_iterations or 0, s_h.solver_iterations or 0),
    )
    return CascadeSolution(sigma_h, s_h, problem, diagnostics)


def flux_mismatch(space: FeSpace, solution: CascadeSolution, h=None) -> float:
    """Boundary L2 distance between the recovered flux of sigma_h and a
    flux datum (defaults to the problem's own h).

    Passing a different h probes incompatible data: the mismatch then
    stays bounded from below by the boundary L2 norm of the perturbation
    instead of shrinking under refinement.
    """
    if h is None:
        h = solution.problem.h
    flux = normal_flux(space, solution.sigma_h, solution.problem.f)
    return flux.l2_mismatch(h)


def _require_clamped_on_square(r: Polynomial2D) -> None:
    sides = [
        (r.subs_y(0), r.diff("y").subs_y(0)),
        (r.subs_y(1), r.diff("y").subs_y(1)),
        (r.subs_x(0), r.diff("x").subs_x(0)),
        (r.subs_x(1), r.diff("x").subs_x(1)),
    ]
    for trace, normal_derivative in sides:
        if not trace.is_zero():
            raise ValueError("test polynomial has a nonzero boundary trace")
        if not normal_derivative.is_zero():
            raise ValueError("test polynomial has a nonzero boundary normal derivative")


def weak_form_residual(
    space: FeSpace,
    solution: CascadeSolution,
    problem: NeumannProblem,
    r: Polynomial2D,
) -> float:
    """Defect of sigma_h in the weak formulation, tested against the
    Laplacian of a doubly-clamped polynomial r:

        | (sigma_h, bilap r) - (f, lap r) - <g, d(lap r)/dn> + <h, lap r> |

    For the exact sigma this combination vanishes identically (two
    integrations by parts move the bilaplacian across), so the value
    measures how far sigma_h is from satisfying the original fourth-order
    equation in weak form. The polynomial must vanish on the boundary of
    the unit square together with its normal derivative; both conditions
    are checked by exact substitution, and non-square domains are
    rejected because the check (and the identity) needs exact boundary
    arithmetic.
    """
    if space.mesh.domain_tag is not DomainTag.UNIT_SQUARE:
        raise ValueError("weak form residual is implemented for the unit square only")
    _require_clamped_on_square(r)

    omega = r.laplacian()
    bilap = omega.laplacian()

    vol_rule = triangle_quadrature(DIAGNOSTIC_VOLUME_ORDER)
    x, y = quad_points(space.mesh, vol_rule)
    sigma_vals = field_values(solution.sigma_h, vol_rule)
    term_sigma = integrate(space.mesh, vol_rule, sigma_vals * bilap(x, y))
    f_vals = _coerce_values(problem.f(x, y) if callable(problem.f) else problem.f, x.shape)
    term_f = integrate(space.mesh, vol_rule, f_vals * omega(x, y))

    b_rule = default_boundary_rule()
    _, bx, by, lengths, normals = boundary_geometry(space.mesh, b_rule)
    g_vals = _coerce_values(problem.g(bx, by) if callable(problem.g) else problem.g, bx.shape)
    h_vals = _coerce_values(problem.h(bx, by) if callable(problem.h) else problem.h, bx.shape)
    ox, oy = omega.grad()
    dn_omega = ox(bx, by) * normals[:, 0:1] + oy(bx, by) * normals[:, 1:2]
    term_g = np.einsum("eq,q,e->", g_vals * dn_omega, b_rule.weights, lengths)
    term_h = np.einsum("eq,q,e->", h_vals * omega(bx, by), b_rule.weights, lengths)

    return abs(term_sigma - term_f - term_g + term_h)
