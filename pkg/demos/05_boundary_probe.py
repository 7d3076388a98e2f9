"""
Boundary behaviour: the v_q curve and the regularity probe
==========================================================

Near the real axis the fixed point is reparametrized by v_q(u), the
imaginary part of the boundary solution; its q -> 0 limit draws the upper
envelope of the support.  At points outside the support, a Julia-
Caratheodory style probe drives y -> 0 along u + iy and tests whether the
subordination function admits a bounded nontangential derivative.
"""

import numpy as np

from freeconv import (
    CPMap,
    ScalarMeasure,
    SolverConfig,
    horodisc_membership,
    jc_probe,
    scalar_to_model,
    semicircle_problem,
    solve_vq,
)
from freeconv.transforms import biane_v_scalar

prob = semicircle_problem(scalar_to_model(ScalarMeasure.point(0.0)),
                          CPMap.scaled_identity(1.0, 1))
cfg = SolverConfig(damping=0.5, max_iter=200000)

# -- the boundary curve --------------------------------------------------------
# for the semicircle the curve is the half-circle v = sqrt(1 - u^2);
# solve_vq at q = 1e-4 should hug it at interior points and drop outside.
print("   u     v_q (q=1e-4)   limit curve")
for u in (0.0, 0.5, 0.9, 1.2, 1.5):
    v = solve_vq(prob, np.array([[1e-4]]), np.array([[u]]), cfg).value[0, 0].real
    print(f"  {u:.2f}   {v:12.6f}   {biane_v_scalar(ScalarMeasure.point(0.0), 1.0, u):.6f}")

# -- probing a regular exterior point -------------------------------------------
# alpha = 3 lies outside [-2, 2]; omega(3 + iy) converges to a selfadjoint
# limit, the quotient Im h(omega)/y stays bounded, and the amplified h'
# norms settle below 1: the probe declares the boundary point regular.
schedule = tuple(10.0 ** (-k) for k in range(0, 7))
eye = np.eye(1)
out = jc_probe(prob, 3.0 * eye, eye, eye, schedule, cfg)
print(f"\nalpha = 3 (exterior): applicable = {out.applicable}")
for name, ok in out.verdicts.items():
    print(f"  {name:26s} {'PASS' if ok else 'FAIL'}")
print(f"  omega limit {out.omega_limit[0,0].real:.6f} "
      f"(hand value {(3 + np.sqrt(5)) / 2:.6f}), |h'| -> {out.hprime_norms[-1]:.6f}")

# -- an interior point stays away from the boundary ------------------------------
out0 = jc_probe(prob, 0.0 * eye, eye, eye, schedule, cfg)
print(f"\nalpha = 0 (interior): applicable = {out0.applicable} ({out0.reason}); "
      f"Im omega stays near {out0.im_norms[-1]:.4f}")

# -- horodiscs map into horodiscs -------------------------------------------------
# at the regular point h contracts each open horodisc into the closed
# horodisc of the same parameter at the image point.
omega_star = (3.0 + np.sqrt(5.0)) / 2.0
h = lambda w: -1.0 / w
worst = True
for kappa in (1.0, 2.0, 10.0):
    r = 1.0 / kappa
    for theta in np.linspace(0.0, 2.0 * np.pi, 25):
        w = omega_star + 0.5j * r + 0.45 * r * np.exp(1j * theta)
        ok = horodisc_membership(np.array([[h(omega_star)]]), r * np.eye(1),
                                 np.array([[h(w)]]), tol=1e-8)
        worst = worst and ok
print(f"\nhorodisc mapping at kappa in {{1, 2, 10}}: "
      f"{'all contained' if worst else 'violation found'}")
