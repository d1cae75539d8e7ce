"""Boundary symbol computation behind the well-posedness of the problem.

The two boundary operators of the fourth-order Neumann problem have
symbols B1 = 1 + t^2 and B2 = t + t^3 in the tangential/normal variable
t. Reducing them modulo (t - i)^2, the square of the root of the
interior symbol in the upper half plane, leaves remainders that are
linearly dependent over the complex numbers: B2 is exactly i times B1
modulo (t - i)^2. The classical independence requirement fails, which is
why the flux datum h must be treated as constrained rather than imposed.
All arithmetic here is exact over Gaussian rationals; no tolerances.
"""

from biharm.polynomials import complementing_check, laplace_complementing_check

result = complementing_check()
print("B1 = 1 + t^2,  B2 = t + t^3,  modulus (t - i)^2")
print("remainder of B1:", result.remainder1)
print("remainder of B2:", result.remainder2)
print("linearly dependent:", result.linearly_dependent)
print("dependence factor:", result.factor)

# control: the Laplace Neumann symbol t against t - i leaves the nonzero
# constant i, so the second-order Neumann problem passes the same test
print("control, Laplace flux symbol:", laplace_complementing_check())
