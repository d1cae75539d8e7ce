"""Solve the fourth-order Neumann problem by the triangular cascade.

The problem asks for u with bilaplacian(u) = f where the boundary
carries the trace g and the normal derivative h of laplace(u). Setting
sigma = laplace(u) turns this into two chained Dirichlet Poisson solves;
h never enters either solve and is consumed only by the diagnostics.
Both built-in manufactured cases have solutions with zero trace, so the
zero-trace representative s_h converges to the solution itself.
"""

from biharm.biharmonic import NeumannProblem, solve_neumann
from biharm.cli import write_vtk
from biharm.fem import build_space
from biharm.manufactured import cases, l2_error
from biharm.mesh import unit_square_mesh

for name, case in cases().items():
    print(f"case {name}")
    problem = NeumannProblem(case.f, case.g, case.h)
    for n in (8, 16, 32):
        space = build_space(unit_square_mesh(n), 1)
        sol = solve_neumann(space, problem)
        err_sigma = l2_error(space, sol.sigma_h, case.sigma_exact)
        err_s = l2_error(space, sol.s_h, case.u_exact)
        d = sol.diagnostics
        print(
            f"  n={n:3d}  l2_sigma={err_sigma:.4e}  l2_s={err_s:.4e}  "
            f"compat_max={d.compat_max:.2e}  flux_mismatch={d.flux_mismatch:.3f}"
        )

# write the finest sine solution for a VTK viewer
case = cases()["sine"]
space = build_space(unit_square_mesh(32), 1)
sol = solve_neumann(space, NeumannProblem(case.f, case.g, case.h))
write_vtk("cascade_sine.vtk", space.mesh, {
    "sigma": sol.sigma_h.vertex_values(),
    "s": sol.s_h.vertex_values(),
})
print("wrote cascade_sine.vtk")
