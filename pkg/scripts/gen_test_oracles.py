"""Regenerate the frozen oracle constants pasted into the test suite.

Each block below derives a reference value with sympy exact arithmetic
(or Decimal where noted) and prints it at 30 significant digits. The
test files hard-code these outputs so the suite never depends on sympy
at run time. Rerun after any deliberate change to the conventions and
re-paste.
"""

from __future__ import annotations

import sympy as sp


def fmt(x, digits=30):
    return sp.N(x, digits)


def spherical_block():
    """Cartesian -> angles/range and full MSC rate conversion."""
    x, y, z = sp.Rational(-2000), sp.Rational(500), sp.Rational(700)
    vx, vy, vz = sp.Rational(200), sp.Rational(0), sp.Rational(50)
    ax, ay, az = sp.Rational(3, 2), sp.Rational(-2), sp.Rational(1, 4)

    rho2 = x * x + y * y
    rho = sp.sqrt(rho2)
    r = sp.sqrt(rho2 + z * z)
    psi = sp.atan2(y, x)
    theta = sp.atan2(z, rho)

    rdot = (x * vx + y * vy + z * vz) / r
    rhodot = (x * vx + y * vy) / rho
    psidot = (x * vy - y * vx) / rho2
    thetadot = (vz * rho - z * rhodot) / (r * r)

    s = 1 / r
    tau = rdot / r
    omega = psidot * sp.cos(theta)

    print("# spherical / msc oracle (pos, vel as in test)")
    for name, val in [
        ("psi", psi),
        ("theta", theta),
        ("r", r),
        ("omega", omega),
        ("thetadot", thetadot),
        ("tau", tau),
        ("s", s),
    ]:
        print(f"{name} = {fmt(val)}")

    # the appended accel states stay in Cartesian axes, scaled by s;
    # the drift rows carry the trig projection, not the state itself
    for name, a in [("sigma_x", ax), ("sigma_y", ay), ("sigma_z", az)]:
        print(f"{name} = {fmt(s * a)}")


def drift_block():
    """Core and extended drift rows at one fixed off-axis state."""
    omega, thetadot, tau = sp.Rational(3, 100), sp.Rational(-2, 100), sp.Rational(5, 100)
    psi, theta, s = sp.Rational(1, 5), sp.Rational(3, 10), sp.Rational(1, 2000)

    f_core = [
        -2 * tau * omega + thetadot * omega * sp.tan(theta),
        -(omega**2) * sp.tan(theta) - 2 * thetadot * tau,
        thetadot**2 + omega**2 - tau**2,
        omega / sp.cos(theta),
        thetadot,
        -tau * s,
    ]
    print("# core drift oracle")
    for i, v in enumerate(f_core):
        print(f"f[{i}] = {fmt(v)}")

    sx, sy, sz = sp.Rational(1, 1000), sp.Rational(-2, 1000), sp.Rational(3, 1000)
    f_nca_extra = [
        -sx * sp.sin(psi) + sy * sp.cos(psi),
        -sx * sp.sin(theta) * sp.cos(psi) - sy * sp.sin(theta) * sp.sin(psi) + sz * sp.cos(theta),
        sx * sp.cos(theta) * sp.cos(psi) + sy * sp.cos(theta) * sp.sin(psi) + sz * sp.sin(theta),
    ]
    print("# nca accel coupling oracle (same core state)")
    for i, v in enumerate(f_nca_extra):
        print(f"f_nca[{i}] = {fmt(f_core[i] + v)}")
    for i in range(3):
        print(f"f_nca[{6 + i}] = {fmt(-tau * [sx, sy, sz][i])}")

    wt = sp.Rational(22, 100)
    f_ct_extra = [
        tau * wt * sp.cos(theta) - thetadot * wt * sp.sin(theta),
        omega * wt * sp.sin(theta),
        -omega * wt * sp.cos(theta),
    ]
    print("# ct turn coupling oracle (same core state)")
    for i, v in enumerate(f_ct_extra):
        print(f"f_ct[{i}] = {fmt(f_core[i] + v)}")


def scheduler_block():
    """Predicted range stats through the 3-point transform, Decimal-grade."""
    from decimal import Decimal, getcontext

    getcontext().prec = 60
    for s_hat, p_s, lam in [
        ("0.0005", "1e-10", "-0.999999"),
        ("0.002", "2.5e-9", "0.5"),
        ("0.00033", "4e-11", "2.0"),
    ]:
        sh, ps, lm = Decimal(s_hat), Decimal(p_s), Decimal(lam)
        n = Decimal(1)
        spread = ((n + lm) * ps).sqrt()
        s0, s1, s2 = sh, sh + spread, sh - spread
        w0 = lm / (n + lm)
        wi = 1 / (2 * (n + lm))
        r0, r1, r2 = 1 / s0, 1 / s1, 1 / s2
        r_hat = r0 + wi * ((r1 - r0) + (r2 - r0))
        d0, d1, d2 = r0 - r_hat, r1 - r_hat, r2 - r_hat
        p_r = w0 * d0 * d0 + wi * (d1 * d1 + d2 * d2)
        print(f"# s_hat={s_hat} p_s={p_s} lambda={lam}")
        print(f"r_hat = {r_hat}")
        print(f"sigma_r = {p_r.sqrt()}")


if __name__ == "__main__":
    spherical_block()
    print()
    drift_block()
    print()
    scheduler_block()
