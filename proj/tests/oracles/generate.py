"""Reference values for the unit tests, computed with mpmath at 60 digits.

phi_lambda(t) = 2F1((rho + i l)/2, (rho - i l)/2; n/2; -sinh^2 t), analytically continued by mpmath.
c(lambda) is extracted from the large-t behaviour e^{rho t} phi ~ c(l) e^{i l t} + c(-l) e^{-i l t}
(two-point solve at t = 40, 40.5), so it does not use any Gamma-quotient closed form.
"""
import mpmath as mp

mp.mp.dps = 60
SPACES = {"H2": (1, 0), "H3": (2, 0), "CH2": (2, 1)}


def dims(ma, m2a):
    return ma + m2a + 1, mp.mpf(ma + 2 * m2a) / 2


def phi(space, lam, t):
    n, rho = dims(*SPACES[space])
    i = mp.mpc(0, 1)
    return mp.hyp2f1((rho + i * lam) / 2, (rho - i * lam) / 2, mp.mpf(n) / 2, -mp.sinh(t) ** 2)


def c_fit(space, lam):
    _, rho = dims(*SPACES[space])
    i = mp.mpc(0, 1)
    t1, t2 = mp.mpf(40), mp.mpf("40.5")
    y1, y2 = phi(space, lam, t1) * mp.exp(rho * t1), phi(space, lam, t2) * mp.exp(rho * t2)
    A = mp.matrix([[mp.exp(i * lam * t1), mp.exp(-i * lam * t1)], [mp.exp(i * lam * t2), mp.exp(-i * lam * t2)]])
    sol = mp.lu_solve(A, mp.matrix([y1, y2]))
    return sol[0]


def fmt(z):
    z = mp.mpc(z)
    return "{%s, %s}" % (mp.nstr(z.real, 17, min_fixed=-30, max_fixed=30), mp.nstr(z.imag, 17, min_fixed=-30, max_fixed=30))


print("// phi: space, lambda, t, value")
for s in SPACES:
    for lam in (mp.mpf("0.5"), mp.mpf(2), mp.mpc(1, "0.3")):
        for t in ("0.3", "1.5", "4"):
            print('    {"%s", %s, %s, %s},' % (s, fmt(lam), t, fmt(phi(s, lam, mp.mpf(t)))))
print("// c: space, lambda, value")
for s in SPACES:
    for lam in ("0.5", "1", "3"):
        print('    {"%s", %s, %s},' % (s, lam, fmt(c_fit(s, mp.mpf(lam)))))
print("// cJ: mu, z, value  (Gamma(mu+1) (z/2)^-mu J_mu(z))")
for mu in ("0", "0.5", "1"):
    for z in (mp.mpf("0.7"), mp.mpf(9), mp.mpc(2, 1)):
        v = mp.gamma(mp.mpf(mu) + 1) * (z / 2) ** (-mp.mpf(mu)) * mp.besselj(mp.mpf(mu), z)
        print("    {%s, %s, %s}," % (mu, fmt(z), fmt(v)))
