"""
Adding free semicircular noise to a deterministic model
=======================================================

The Cauchy transform of mu + semicircular(t) is computed through a
subordination fixed point.  For the point mass at zero the answer has a
quadratic closed form, which makes a good first check; a matrix-valued
model then shows the same call working over a 2x2 base algebra.
"""

import numpy as np

from freeconv import (
    CPMap,
    OperatorModel,
    ScalarMeasure,
    SemicircularConvolution,
    scalar_to_model,
    semicircular_convolve_g,
)

np.set_printoptions(precision=6, suppress=True)

# -- a scalar sanity check against the closed form --------------------------
# delta_0 plus semicircular(t) is the semicircle law itself, with
# G(z) = (z - sqrt(z - 2 sqrt(t)) sqrt(z + 2 sqrt(t))) / (2 t).
model = scalar_to_model(ScalarMeasure.point(0.0))
t = 1.0
for z in (2j, 1.0 + 0.5j, -0.3 + 0.1j):
    G = semicircular_convolve_g(model, t, np.array([[z]]))[0, 0]
    r = 2.0 * np.sqrt(t)
    closed = (z - np.sqrt(z - r) * np.sqrt(z + r)) / (2.0 * t)
    print(f"G({z: .2f}) = {G: .6f}   closed form {closed: .6f}   "
          f"error {abs(G - closed):.2e}")

# -- the semigroup property --------------------------------------------------
# adding noise of variance s and then t is adding noise of variance s + t;
# the second convolution only sees the first through its Cauchy transform.
s = 0.6
inner = SemicircularConvolution(model, CPMap.scaled_identity(s, 1))
z = 0.4 + 0.3j
G_two_steps = semicircular_convolve_g(inner, 0.7, np.array([[z]]))[0, 0]
G_one_step = semicircular_convolve_g(model, 1.3, np.array([[z]]))[0, 0]
print(f"\nsemigroup check at {z}: two steps {G_two_steps:.10f}")
print(f"                        one step  {G_one_step:.10f}")

# -- a matrix-valued model ---------------------------------------------------
# X lives in M_8, the base algebra is M_2 (so E is a partial trace over the
# 4-dimensional factor), and the covariance is a genuine CP map on M_2.
rng = np.random.default_rng(0)
A = rng.standard_normal((8, 8))
X = (A + A.T) / np.sqrt(16.0)
model2 = OperatorModel.partial_trace(X, base_dim=2)

K = [np.array([[1.0, 0.2], [0.0, 0.7]]), np.array([[0.0, 0.5], [0.1, 0.3]])]
beta = CPMap.from_kraus(K, to_base=False)

b = np.array([[1j, 0.2], [0.2, 0.5 + 1.5j]])
G = semicircular_convolve_g(model2, beta, b)
print(f"\nmatrix-valued G at a generic upper half-plane point:\n{G}")
print(f"Im G is negative definite: "
      f"{np.all(np.linalg.eigvalsh((G - G.conj().T) / 2j) < 0)}")
