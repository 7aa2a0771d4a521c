"""Low-dimensional examples: local minima, Roothaan traps, oscillation and a relaxation gap.

Prints one block per example. Run with ``python3 scripts/low_dim_examples.py``.
"""

import numpy as np

from quadgrass.instances import bloch_projector, three_by_three, two_by_two
from quadgrass.linalg import ConvexPoint, GrassmannPoint
from quadgrass.objective import eval_J, residual
from quadgrass.solvers import certify_global, oda_convex, roothaan, roothaan_tilde
from quadgrass.special import bruteforce_angle_2x2

np.set_printoptions(precision=6, suppress=True)


def trap():
    inst = two_by_two(a=1.0, alpha=1.0, beta=0.0, c=0.1)
    print("2x2 trap (a=1, alpha=1, beta=0, c=0.1)")
    for name, P in (("diag(1,0)", np.diag([1.0, 0.0])), ("diag(0,1)", np.diag([0.0, 1.0]))):
        rep = roothaan(inst, GrassmannPoint(P, 1))
        print(f"  roothaan from {name}: {rep.status}, J = {rep.objective:+.12f}")
    scan = bruteforce_angle_2x2(inst)
    print(f"  angle scan: J* = {scan.J_star:+.12f} at theta = {scan.theta_star:.12f}")
    for theta, J in scan.minima:
        print(f"    local minimum theta = {theta:.6f}, J = {J:+.12f}")


def oscillation():
    beta = 0.1
    inst = two_by_two(a=1.0, alpha=1.0, beta=beta, c=0.0)
    print(f"2x2 off-diagonal family (alpha=1, c=0, beta={beta})")
    rep = roothaan_tilde(inst, GrassmannPoint(bloch_projector(1.0, 0.0), 1))
    print(f"  roothaan on the convexified map: {rep.status} after {rep.iterations} iterations")
    for k, row in enumerate(rep.trace[:4]):
        print(f"    iter {k}: J = {row.objective:+.6f}, residual = {row.residual:.2e}")
    for x in (1.0, -1.0):
        P = bloch_projector(x, 0.0)
        print(f"  P_({x:+.0f},0): J = {eval_J(inst, P):+.6f}, residual = {residual(inst, P):.1e}")
    scan = bruteforce_angle_2x2(inst)
    print(f"  global: J* = {scan.J_star:+.12f} (-2 beta^2 = {-2 * beta**2:+.12f})")


def relaxation_gap():
    inst = three_by_three()
    print("3x3 relaxation example (a=(1,2,3), beta=0, alpha=1/2)")
    rep = oda_convex(inst, ConvexPoint.uniform(3, 1))
    D = rep.final_point.D
    print(f"  oda-convex: {rep.status}, ||D^2 - D|| = {np.linalg.norm(D @ D - D):.3e}")
    print("  D* =\n" + "\n".join("    " + str(r) for r in D))
    cert = certify_global(inst, D)
    print(f"  spectrum of H* = {cert.mu}, gap = {cert.gap:.2e}, certified = {cert.certified}")


if __name__ == "__main__":
    for block in (trap, oscillation, relaxation_gap):
        block()
        print()
