"""Reference values for the unit tests, computed at 50 digits with mpmath.

Run:  python3 gen_oracles.py > oracle_values.txt
The C++ tests carry these numbers as literals; this script is how they were
produced and how to regenerate them.
"""
import mpmath as mp

mp.mp.dps = 50


def out(tag, *args):
    print(tag, " ".join(mp.nstr(mp.mpf(a), 20) for a in args))


# Γ and incomplete Γ
for x in ["1e-5", "0.5", "3.7", "171.3", "1e4"]:
    out("ln_gamma", x, mp.loggamma(mp.mpf(x)))
for a, x in [("0.5", "0.1"), ("5", "3"), ("30", "45"), ("200", "180"), ("1e-3", "2"), ("1500", "1400")]:
    a, x = mp.mpf(a), mp.mpf(x)
    out("gamma_pq", a, x, mp.gammainc(a, 0, x, regularized=True), mp.gammainc(a, x, mp.inf, regularized=True))
for a, z in [("2.5", "1"), ("-1.5", "0.3"), ("0.25", "40"), ("-20.5", "3")]:
    a, z = mp.mpf(a), mp.mpf(z)
    out("upper_gamma", a, z, mp.gammainc(a, z, mp.inf))

# e^z E_ν(z)
for nu, z in [("1", "0.5"), ("2.5", "3"), ("0.3", "0.01"), ("20", "1e-3"), ("0", "2"),
              ("412.01", "193.54"), ("1648", "48.4"), ("1", "1"), ("-3.5", "0.7"), ("7.25", "600")]:
    nu, z = mp.mpf(nu), mp.mpf(z)
    out("scaled_en", nu, z, mp.exp(z) * mp.expint(nu, z))

# Tricomi U
for a, b, z in [("0.5", "1.5", "2"), ("3", "0.5", "0.7"), ("10.2", "11.3", "50"), ("1.5", "-2.5", "4"),
                ("2", "3", "0.05")]:
    a, b, z = mp.mpf(a), mp.mpf(b), mp.mpf(z)
    out("kummer_u", a, b, z, mp.hyperu(a, b, z))

# Q and its inverse
for p in ["1e-9", "1e-3", "0.3", "1e-15", "0.9"]:
    p = mp.mpf(p)
    out("inv_q", p, -mp.sqrt(2) * mp.erfinv(2 * p - 1))
out("q", 3, mp.erfc(3 / mp.sqrt(2)) / 2)

# Rate pieces at γ = 10, r = 100, ε = 1e-9
pen = -mp.sqrt(2) * mp.erfinv(2 * mp.mpf("1e-9") - 1) / 10
g = mp.mpf(10)
cap = mp.log(1 + g) / mp.log(2)
disp = (g * (g + 2) / (1 + g) ** 2) * mp.log(mp.e, 2) ** 2
out("fbl_point", g, cap, disp, cap - pen * mp.sqrt(disp))


# Average rate for Gamma(α, β) SNR (rate convention), r = 100, ε = 1e-9
def avg(alpha, beta):
    alpha, beta = mp.mpf(alpha), mp.mpf(beta)
    pdf = lambda y: beta ** alpha * y ** (alpha - 1) * mp.exp(-beta * y) / mp.gamma(alpha)
    mean = alpha / beta
    pts = [0, mean / 4, mean, 4 * mean, 40 * mean, mp.inf]
    r1 = mp.quad(lambda y: pdf(y) * mp.log(1 + y), pts) / mp.log(2)
    r2 = mp.quad(lambda y: pdf(y) * mp.sqrt(y * (y + 2)) / (1 + y), pts) / mp.log(2)
    lb1 = mp.log(1 + alpha ** 2 / (beta * (alpha + 1))) / mp.log(2)
    F = mp.exp(beta) * mp.expint(alpha, beta)
    lb2 = (2 - beta + beta * (alpha + beta - 1) * F) / (2 * mp.log(2))
    out("avg_rate", alpha, beta, r1, r2, r1 - pen * r2, lb1 - pen * lb2)


for a, b in [("1", "1"), ("5", "0.05"), ("412.01312275749427", "193.53821892251054"), ("20", "0.002"),
             ("2.5", "0.25"), ("1648", "48.4")]:
    avg(a, b)


# E[X], E[X^2] of X = (|h_d| + Σ|h_i||g_i|)^2 with |h_d|^2 ~ Exp(ς), |h_i|^2 ~ Exp(ϱ), |g_i|^2 ~ Exp(ϑ)
def moments(s, r, t, n):
    s, r, t = mp.mpf(s), mp.mpf(r), mp.mpf(t)
    A = [s ** (mp.mpf(k) / 2) * mp.gamma(1 + mp.mpf(k) / 2) for k in range(5)]
    Z = [(r * t) ** (mp.mpf(k) / 2) * mp.gamma(1 + mp.mpf(k) / 2) ** 2 for k in range(5)]
    # moments of a sum of n iid Z by repeated convolution of raw moments
    B = [mp.mpf(1)] + [mp.mpf(0)] * 4
    for _ in range(n):
        B = [sum(mp.binomial(k, j) * B[j] * Z[k - j] for j in range(k + 1)) for k in range(5)]
    m = lambda k: sum(mp.binomial(k, j) * A[j] * B[k - j] for j in range(k + 1))
    out("moments", s, r, t, n, m(2), m(4))


for args in [("1e-3", "1e-2", "1e-2", 1), ("0.5", "2", "0.25", 8), ("0", "1", "1", 32), ("3", "0.1", "7", 100),
             ("0", "2e-7", "3e-7", 1024)]:
    moments(*args)
