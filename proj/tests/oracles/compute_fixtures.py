"""Independent high-precision oracle for the frozen test fixtures.

Uses mpmath at 50 digits and brute-force enumeration; shares no code with the
C++ library. Run: python3 tests/oracles/compute_fixtures.py
"""
from fractions import Fraction
from itertools import product
from math import comb, factorial

import mpmath as mp

mp.mp.dps = 50

P = [mp.mpf(1) / 5, mp.mpf(3) / 10, mp.mpf(1) / 2]
Q = [mp.mpf(2) / 3, mp.mpf(1) / 9, mp.mpf(2) / 9]


def tilt(base, a):
    w = [b * qk**a for b, qk in zip(base, Q)]
    z = sum(w)
    return [x / z for x in w]


def kl(a, b):
    return sum(x * mp.log(x / y) for x, y in zip(a, b))


def cross(a, b):
    return -sum(x * mp.log(y) for x, y in zip(a, b))


def solve_alpha(delta):
    lo, hi = mp.mpf(0), mp.mpf(1)
    while kl(tilt(P, hi), P) < delta:
        hi *= 2
    for _ in range(400):
        mid = (lo + hi) / 2
        if kl(tilt(P, mid), P) < delta:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def compositions(m, k):
    if k == 1:
        yield (m,)
        return
    for c in range(m, -1, -1):
        for rest in compositions(m - c, k - 1):
            yield (c,) + rest


def bon_type_law(m, log_n):
    """Per-class best-of-N probabilities by the order-statistics formula."""
    n = mp.e**log_n
    types = list(compositions(m, 3))
    rows = []
    for t in types:
        size = mp.mpf(factorial(m)) / mp.fprod(factorial(c) for c in t)
        pseq = mp.fprod(pk**c for pk, c in zip(P, t))
        rew = sum(c * mp.log(qk) for qk, c in zip(Q, t))
        rows.append((t, size, pseq, rew))
    out = []
    for t, size, pseq, rew in rows:
        le = sum(s * ps for _, s, ps, r in rows if r <= rew + mp.mpf(10) ** -30)
        lt = sum(s * ps for _, s, ps, r in rows if r < rew - mp.mpf(10) ** -30)
        lvl = le - lt
        out.append((t, size, (le**n - lt**n) * pseq / lvl))
    return out


def example1_table():
    p = [Fraction(1, 5), Fraction(3, 10), Fraction(1, 2)]
    r = {0: 6, 1: 1, 2: 2}  # reward exp-values: log 6, log 1, log 2
    seqs = list(product(range(3), repeat=2))
    pi = {s: Fraction(0) for s in seqs}
    for a, b in product(seqs, repeat=2):
        w = p[a[0]] * p[a[1]] * p[b[0]] * p[b[1]]
        ra, rb = r[a[0]] * r[a[1]], r[b[0]] * r[b[1]]
        if ra > rb:
            pi[a] += w
        elif rb > ra:
            pi[b] += w
        else:
            pi[a] += w / 2
            pi[b] += w / 2
    return pi


if __name__ == "__main__":
    a = solve_alpha(mp.mpf("0.11"))
    phi = tilt(P, a)
    print("alpha(0.11) =", mp.nstr(a, 20))
    print("phi =", [mp.nstr(x, 20) for x in phi])
    print("H(phi||q) =", mp.nstr(cross(phi, Q), 20))
    print("H(p||q) =", mp.nstr(cross(P, Q), 20))
    print("H(p) =", mp.nstr(cross(P, P), 20))
    print("KL(p||q) =", mp.nstr(kl(P, Q), 20))
    print("H2(p||q) = -log sum p q =", mp.nstr(-mp.log(sum(x * y for x, y in zip(P, Q))), 20))
    print("H2(phi||q) =", mp.nstr(-mp.log(sum(x * y for x, y in zip(phi, Q))), 20))
    print("T(q,p,1) =", [mp.nstr(x, 20) for x in tilt(P, 1)])
    print("types m=10 K=3:", sum(1 for _ in compositions(10, 3)), comb(12, 2))

    pi = example1_table()
    print("table:", {k: str(v) for k, v in pi.items()})
    kl_ref = sum(float(v) * mp.log(mp.mpf(v.numerator) / v.denominator /
                 (P[k[0]] * P[k[1]])) for k, v in pi.items())
    print("example1 KL(pi||p^2) =", mp.nstr(kl_ref, 20), "log2 =", mp.nstr(mp.log(2), 20))

    law = bon_type_law(10, mp.log(3))
    et = [sum(s * pr * t[k] / 10 for t, s, pr in law) for k in range(3)]
    print("m=10 N=3 expected type =", [mp.nstr(x, 20) for x in et])
    print("L1(et, phi) =", mp.nstr(sum(abs(x - y) for x, y in zip(et, phi)), 20))
    print("L1(p, phi) =", mp.nstr(sum(abs(x - y) for x, y in zip(P, phi)), 20))
    print("KL(pi_3^10||p^10) =", mp.nstr(sum(s * pr * mp.log(pr / mp.fprod(pk**c for pk, c in zip(P, t))) for t, s, pr in law), 20))

    for m in (5, 10, 20):
        law = bon_type_law(m, m * mp.mpf("0.11"))
        rate = sum(s * pr * (mp.log(pr) - sum(c * mp.log(f) for c, f in zip(t, phi)))
                   for t, s, pr in law) / m
        print(f"kl_rate_to_optimal m={m} =", mp.nstr(rate, 20))
