"""50-digit evaluation of the decay-factor series, used to freeze golden values.

Evaluates the printed coefficient formulas literally (no algebraic rewrites),
truncated at the same n_max as the Rust evaluator. The termwise temperature
derivative is obtained by high-precision numerical differentiation of the
truncated sum, independently of the analytic chain rule in the crate.

Usage: python3 bath_oracle.py          (golden constants)
       python3 bath_oracle.py --demo   (CLI demo grid, one row per t)
"""
from mpmath import mp, mpf, log, sqrt, atan, cosh, sinh, cos, sin, pi, diff

mp.dps = 50


def eta_coefficients(eta):
    a = log(eta**2 + 1)
    b = log(sqrt(4 * eta**2 + 1) / (eta**2 + 1))
    c = 2 * atan(eta) - atan(2 * eta)
    return a, b, c


def tau(n, t, wc, T):
    return (wc / (1 + n * wc / (2 * T))) * t


def thermal_term(n, t, wc, T):
    x = tau(n, t, wc, T)
    a = 2 * t / x * (2 * x * atan(x) - log(x**2 + 1))
    b = 2 * t / x * (2 * x * (atan(2 * x) - atan(x)) - log(sqrt(4 * x**2 + 1) / (x**2 + 1)))
    c = 2 * t / x * (x * log((4 * x**2 + 1) / (x**2 + 1)) - 2 * atan(x) + atan(2 * x))
    return a, b, c


def gamma(lam, r, dth, wc, T, t, n_max):
    ae, be, ce = eta_coefficients(wc * t)
    A, B, C = ae, be, ce
    for n in range(1, n_max + 1):
        a, b, c = thermal_term(n, t, wc, T)
        A += T * a
        B += T * b
        C += T * c
    return lam / pi * (A * cosh(2 * r) - sinh(2 * r) * (B * cos(dth) + C * sin(dth)))


def dgamma_paper(lam, r, dth, wc, T, t, n_max):
    A = B = C = mpf(0)
    for n in range(1, n_max + 1):
        z = 2 * t * T * wc / (n * wc + 2 * T)
        A += 2 * (4 * t * atan(z) - 2 / wc * log(z**2 + 1))
        B += 2 * (-2 / wc * log(sqrt(4 * z**2 + 1) / (z**2 + 1)) - 4 * t * atan(z) + 4 * t * atan(2 * z))
        C += 2 * (2 / wc) * (t * wc * log((4 * z**2 + 1) / (z**2 + 1)) - 2 * atan(z) + atan(2 * z))
    return lam / pi * (A * cosh(2 * r) - sinh(2 * r) * (B * cos(dth) + C * sin(dth)))


def dgamma_termwise(lam, r, dth, wc, T, t, n_max):
    mp.dps = 40
    v = diff(lambda temp: gamma(lam, r, dth, wc, temp, t, n_max), T)
    mp.dps = 50
    return v


def show(name, v):
    print(f"{name} = {mp.nstr(v, 25)}")


def demo_grid():
    # same float arithmetic as the CLI linear grid: 0.1..0.5, 5 points
    start, end, steps = 0.1, 0.5, 5
    return [end if i == steps - 1 else start + (end - start) * i / (steps - 1) for i in range(steps)]


def demo():
    print("# t gamma dgamma_termwise dgamma_paper (lambda=0.4 r=0.5 dtheta=0.9 omega_c=1 temp=10 n_max=1000)")
    for t in demo_grid():
        p = (mpf("0.4"), mpf("0.5"), mpf("0.9"), mpf(1), mpf(10), mpf(t), 1000)
        vals = [gamma(*p), dgamma_termwise(*p), dgamma_paper(*p)]
        print(repr(t), " ".join(mp.nstr(v, 25) for v in vals))


if __name__ == "__main__":
    import sys

    if "--demo" in sys.argv:
        demo()
        sys.exit(0)
    for i, v in enumerate(eta_coefficients(mpf(10))):
        show(f"eta10[{i}]", v)
    for i, v in enumerate(thermal_term(1, mpf(1), mpf(1), mpf(10))):
        show(f"thermal_n1_T10_t1[{i}]", v)
    golden = (mpf("0.4"), mpf("0.5"), mpf("0.9"), mpf(1), mpf(10), mpf("0.5"), 1000)
    show("gamma_golden", gamma(*golden))
    show("dgamma_paper_golden", dgamma_paper(*golden))
    show("dgamma_termwise_golden", dgamma_termwise(*golden))
