"""Independent high-precision reference computations (mpmath).

None of these call into wald_lab. Boundaries come from nested bisection on the
raw threshold equations; stopping statistics come from first-passage theory
for a drifted Brownian motion in log-odds (scale function plus Wald's
identity); the discounted value comes from the Laplace transform of the exit
time.
"""

import mpmath as mp

mp.mp.dps = 40


def g_fun(x):
    return mp.e ** x - mp.e ** (-x) + 2 * x


def h_fun(x, ell_tilde):
    return x + mp.e ** x - mp.e ** ell_tilde * (x - mp.e ** (-x))


def threshold_residuals(lo, hi, k, c_tilde, ell_tilde):
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    r1 = g_fun(hi) - g_fun(lo) - mp.mpf(k) ** 2 / c_tilde
    r2 = h_fun(hi, ell_tilde) - h_fun(lo, ell_tilde)
    return r1, r2


def _bisect(f, a, b, iters=200):
    fa, fb = f(a), f(b)
    if fa == 0:
        return a
    if fb == 0:
        return b
    for _ in range(iters):
        m = (a + b) / 2
        fm = f(m)
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return (a + b) / 2


def oracle_boundaries(k, c_tilde, ell_tilde):
    """Interior thresholds by nested bisection in mpmath (assumes they straddle ell_tilde)."""
    k, c_tilde, lt = mp.mpf(k), mp.mpf(c_tilde), mp.mpf(ell_tilde)
    big_k = k ** 2 / c_tilde

    def lower_for(hi):
        target = h_fun(hi, lt)
        a = lt - 1
        while h_fun(a, lt) < target:
            a = lt + 2 * (a - lt)
        return _bisect(lambda x: h_fun(x, lt) - target, a, lt)

    def gap(hi):
        return g_fun(hi) - g_fun(lower_for(hi)) - big_k

    b = lt + 1
    while gap(b) < 0:
        b = lt + 2 * (b - lt)
    hi = _bisect(gap, lt, b, iters=160)
    return lower_for(hi), hi


def first_passage(lo, hi, k):
    """(accuracy, expected time, prob choose a) starting from log-odds 0."""
    lo, hi, k = mp.mpf(lo), mp.mpf(hi), mp.mpf(k)
    drift = 2 * k ** 2
    # state a: drift +2k^2, variance 4k^2, scale function exp(-x)
    pa_hi = (1 - mp.e ** (-lo)) / (mp.e ** (-hi) - mp.e ** (-lo))
    # state b: drift -2k^2, scale function exp(x)
    pb_hi = (1 - mp.e ** lo) / (mp.e ** hi - mp.e ** lo)
    ta = (pa_hi * hi + (1 - pa_hi) * lo) / drift
    tb = -(pb_hi * hi + (1 - pb_hi) * lo) / drift
    return (pa_hi + 1 - pb_hi) / 2, (ta + tb) / 2, (pa_hi + pb_hi) / 2


def discounted_value(ell, r, k):
    """E[exp(-r tau) 1{correct}] for symmetric thresholds +-ell, unit prize."""
    ell, r, k = mp.mpf(ell), mp.mpf(r), mp.mpf(k)
    root = mp.sqrt(1 + 2 * r / k ** 2)
    l1, l2 = (-1 + root) / 2, (-1 - root) / 2
    # state a: u(ell)=1, u(-ell)=0 for generator 2k^2 (u'' + u')
    m = mp.matrix([[mp.e ** (l1 * ell), mp.e ** (l2 * ell)], [mp.e ** (-l1 * ell), mp.e ** (-l2 * ell)]])
    ca = mp.lu_solve(m, mp.matrix([1, 0]))
    ua = ca[0] + ca[1]
    # state b mirrors x -> -x; same value by symmetry
    return ua


def discounted_boundary(r, k):
    f = lambda x: discounted_value(x, r, k)
    df = lambda x: mp.diff(f, x)
    a, b = mp.mpf("1e-6"), mp.mpf(1)
    while df(b) > 0:
        b *= 2
    return _bisect(df, a, b, iters=140)


def bonus_sensitivity(lo, hi):
    """d P(choose a) / d exp(l~) at optimal thresholds (lo, hi), holding k^2/c~ fixed.

    Implicit differentiation of the two threshold equations.
    """
    lo, hi = mp.mpf(lo), mp.mpf(hi)
    span = hi - lo
    e_t = (span + mp.e ** hi - mp.e ** lo) / (span + mp.e ** (-lo) - mp.e ** (-hi))
    lt = mp.log(e_t)
    dh = lambda x: mp.diff(lambda y: h_fun(y, lt), x)
    jac = mp.matrix([[-mp.diff(g_fun, lo), mp.diff(g_fun, hi)], [-dh(lo), dh(hi)]])
    # d/dE of h(hi) - h(lo) with h = x + e^x - E (x - e^-x)
    rhs = mp.matrix([0, (hi - mp.e ** (-hi)) - (lo - mp.e ** (-lo))])
    d_lo, d_hi = mp.lu_solve(jac, rhs)
    pa = lambda a, b: first_passage(a, b, 1)[2]
    return mp.diff(lambda a: pa(a, hi), lo) * d_lo + mp.diff(lambda b: pa(lo, b), hi) * d_hi
