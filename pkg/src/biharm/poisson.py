"""Dirichlet Poisson solves and variational normal-flux recovery.

``solve_dirichlet`` handles ``laplace(w) = q`` with ``w = g`` on the
boundary by eliminating boundary dofs: interpolate g there, move its
stiffness coupling to the right-hand side, and solve the interior system
with conjugate gradients. The source may be a callable on the domain or
an existing finite element field (then the load is the exact mass-matrix
product, which is what lets solves be chained without extra quadrature
error).

``normal_flux`` recovers the consistent variational normal derivative of
a solved field: for boundary dofs i, t_i = (A w)_i + b_i is the discrete
Green identity pairing <dw/dn, phi_i>, and an L2 boundary projection
turns the functional into a pointwise trace-space field. Summing t over
the boundary reproduces the integral of the source exactly up to solver
tolerance (discrete divergence theorem), which the overdetermined
diagnostics below rely on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fem import (
    FeSpace,
    ScalarField,
    assemble_load,
    assemble_mass,
    assemble_stiffness,
    boundary_l2_error,
    boundary_mass_matrix,
    interpolate,
)
from .sparse import cg_solve, matvec

__all__ = [
    "ScalarField",
    "BoundaryFlux",
    "solve_dirichlet",
    "normal_flux",
    "OverdeterminedResult",
    "overdetermined_check",
    "FourthOrderResult",
    "overdetermined_fourth",
]


def _source_load(space: FeSpace, source) -> np.ndarray:
    if isinstance(source, ScalarField):
        if source.space is not space:
            raise ValueError("source field lives on a different space")
        return matvec(assemble_mass(space), source.coeffs)
    return assemble_load(space, source)


def solve_dirichlet(
    space: FeSpace,
    source,
    boundary_value,
    *,
    rel_tol: float = 1e-10,
    max_iter: int | None = None,
) -> ScalarField:
    """Solve laplace(w) = source with w = boundary_value on the boundary.

    Parameters
    ----------
    source : callable on (x, y), constant, or ScalarField on the same space
    boundary_value : callable on (x, y) or constant, interpolated at
        boundary dofs
    rel_tol, max_iter : forwarded to the CG solve of the interior system

    Returns the finite element solution; its ``solver_iterations`` field
    records the CG iteration count (0 when there are no interior dofs).
    """
    a = assemble_stiffness(space)
    b = _source_load(space, source)

    coeffs = np.zeros(space.dof_count)
    bdofs = space.boundary_dofs
    lifted = interpolate(space, boundary_value)
    coeffs[bdofs] = lifted.coeffs[bdofs]

    interior = np.setdiff1d(np.arange(space.dof_count), bdofs, assume_unique=True)
    if len(interior) == 0:
        return ScalarField(space, coeffs, solver_iterations=0)

    # Weak form: (grad w, grad v) = -(q, v) for interior v, boundary part lifted.
    a_ii = a.submatrix(interior, interior)
    a_ib = a.submatrix(interior, bdofs)
    rhs = -b[interior] - matvec(a_ib, coeffs[bdofs])
    result = cg_solve(a_ii, rhs, rel_tol=rel_tol, max_iter=max_iter)
    coeffs[interior] = result.x
    return ScalarField(space, coeffs, solver_iterations=result.iterations)


@dataclass(frozen=True)
class BoundaryFlux:
    """Consistent normal-derivative data of a solved Dirichlet field.

    ``functional`` holds the Green-identity pairings <dw/dn, phi_i> for
    each boundary dof (ordered like ``dofs``); ``projected`` holds the
    coefficients of the L2(boundary) projection of that functional onto
    the boundary trace space, i.e. a pointwise flux field.
    """

    space: FeSpace
    dofs: np.ndarray
    functional: np.ndarray
    projected: np.ndarray

    def total(self) -> float:
        """Sum of the flux functional: the discrete outflow, which equals
        the integral of the source up to solver tolerance."""
        return float(self.functional.sum())

    def l2_norm(self) -> float:
        """Boundary L2 norm of the projected flux field."""
        return boundary_l2_error(self.space, self.projected, None)

    def l2_mismatch(self, target) -> float:
        """Boundary L2 distance between the projected flux and a callable
        or constant target."""
        return boundary_l2_error(self.space, self.projected, target)


def normal_flux(
    space: FeSpace,
    w: ScalarField,
    source,
    *,
    rel_tol: float = 1e-12,
) -> BoundaryFlux:
    """Recover the variational normal derivative of w, given the source it
    was solved with.

    For every boundary dof the functional value is (A w + b)_i; interior
    entries of the same residual vanish to solver tolerance when w came
    out of ``solve_dirichlet``, so no information is lost by restricting.
    """
    if w.space is not space:
        raise ValueError("field lives on a different space")
    a = assemble_stiffness(space)
    residual = matvec(a, w.coeffs) + _source_load(space, source)
    t = residual[space.boundary_dofs]
    mb = boundary_mass_matrix(space)
    projected = cg_solve(mb, t, rel_tol=rel_tol).x
    return BoundaryFlux(space, space.boundary_dofs.copy(), t, projected)


@dataclass(frozen=True)
class OverdeterminedResult:
    """Solvability diagnostics for the fully clamped Poisson problem
    (zero trace and zero normal derivative demanded at once)."""

    u: ScalarField
    flux: BoundaryFlux
    flux_l2: float
    total_flux: float


def overdetermined_check(
    space: FeSpace,
    p,
    *,
    rel_tol: float = 1e-10,
    max_iter: int | None = None,
) -> OverdeterminedResult:
    """Solve laplace(U) = p with zero trace, then measure the leftover
    normal derivative.

    The overdetermined problem (zero trace and zero flux together) is
    solvable exactly when that flux vanishes; ``flux_l2`` tends to zero
    under refinement for such p and stays bounded away from zero
    otherwise. ``total_flux`` always equals the integral of p up to
    solver tolerance, a useful exactness check in itself.
    """
    u = solve_dirichlet(space, p, 0.0, rel_tol=rel_tol, max_iter=max_iter)
    flux = normal_flux(space, u, p)
    return OverdeterminedResult(u, flux, flux.l2_norm(), flux.total())


@dataclass(frozen=True)
class FourthOrderResult:
    """Diagnostics for the fully homogeneous fourth-order problem: bilaplacian
    V = p with zero trace, zero Laplacian trace and zero Laplacian flux."""

    v: ScalarField
    u: ScalarField
    laplacian_trace_l2: float
    flux_l2: float
    total_flux: float


def overdetermined_fourth(
    space: FeSpace,
    p,
    *,
    rel_tol: float = 1e-10,
    max_iter: int | None = None,
) -> FourthOrderResult:
    """Cascade form of the fourth-order overdetermined problem.

    First solve laplace(U) = p with zero trace, then laplace(V) = U with
    zero trace. V then satisfies bilaplacian V = p with V and laplacian V
    both vanishing on the boundary by construction; the one condition not
    built in is the normal flux of U (= of laplacian V), which is
    reported, along with the boundary trace norm of U as a sanity value
    (zero by construction) and the total flux (= integral of p).
    """
    check = overdetermined_check(space, p, rel_tol=rel_tol, max_iter=max_iter)
    v = solve_dirichlet(space, check.u, 0.0, rel_tol=rel_tol, max_iter=max_iter)
    trace = boundary_l2_error(space, check.u.coeffs[space.boundary_dofs], None)
    return FourthOrderResult(v, check.u, trace, check.flux_l2, check.total_flux)
