"""
Free convolution powers and the R-transform
===========================================

mu^{boxplus alpha} scales the R-transform by alpha.  For the symmetric
Bernoulli measure the square has an arcsine law on (-2, 2), and both the
R-transform values and the density grid can be checked against closed forms.
"""

import numpy as np

from freeconv import (
    CPMap,
    ConvolutionPower,
    ScalarMeasure,
    SubordinationProblem,
    convolution_power_g,
    density_grid,
    r_transform_eval,
    scalar_to_model,
)

model = scalar_to_model(ScalarMeasure.symmetric_bernoulli())

# -- R-transform of the Bernoulli law ----------------------------------------
# R(g) = (-1 + sqrt(1 + 4 g^2)) / (2 g); the evaluator inverts the Cauchy
# transform by Newton iteration from w = 1/g, valid for small ||g||.
print("R-transform of (delta_-1 + delta_1)/2 near zero:")
for g in (-0.01j, -0.03j, -0.05j):
    R = r_transform_eval(model, np.array([[g]]))[0, 0]
    closed = (-1.0 + np.sqrt(1.0 + 4.0 * g * g)) / (2.0 * g)
    print(f"  R({g}) = {R:.8f}   closed {closed:.8f}")

# alpha R(g) is the R-transform of the alpha-th convolution power
doubled = ConvolutionPower(model, CPMap.scaled_identity(2.0, 1))
g = -0.04j
print(f"\nadditivity: R_2({g}) = {r_transform_eval(doubled, np.array([[g]]))[0,0]:.8f}"
      f"  vs 2 R({g}) = {2 * r_transform_eval(model, np.array([[g]]))[0,0]:.8f}")

# -- the arcsine square ------------------------------------------------------
# Bernoulli^{boxplus 2} has density 1/(pi sqrt(4 - u^2)) on (-2, 2); compare
# G on the imaginary axis and the recovered density at a few abscissae.
for z in (1j, 2j):
    G = convolution_power_g(model, 2.0, np.array([[z]]))[0, 0]
    closed = 1.0 / (np.sqrt(z - 2.0) * np.sqrt(z + 2.0))
    print(f"\nG_2({z}) = {G:.10f}   closed {closed:.10f}")

prob = SubordinationProblem.power(model, CPMap.scaled_identity(2.0, 1))
grid = density_grid(prob, np.linspace(-1.8, 1.8, 13), (1e-2, 5e-3))
print("\n   u      density    1/(pi sqrt(4-u^2))")
for u, rho in zip(grid.abscissae, grid.density):
    print(f"  {u: .2f}   {rho:.6f}   {1.0 / (np.pi * np.sqrt(4.0 - u * u)):.6f}")
