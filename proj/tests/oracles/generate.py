#!/usr/bin/env python3
"""Regenerates frozen.json, the reference values the C++ tests compare against.

Everything here is computed from definitions with sympy and mpmath; nothing
is read back from the library.
"""
import itertools
import json
import pathlib

import mpmath as mp
import sympy as sp

mp.mp.dps = 30
OUT = pathlib.Path(__file__).with_name("frozen.json")


def c2j(z):
    z = mp.mpc(z)
    return [float(z.real), float(z.imag)]


# ---- beta arithmetic on plain reals

def oplus(beta, x, y):
    return (x + y) / (1 - beta * x * y)


def circ(beta, lam, x):
    sb = mp.sqrt(beta)
    return mp.tan(lam * mp.atan(sb * x)) / sb


def pairing(beta, q, p):
    sb = mp.sqrt(beta)
    return q * mp.atan(sb * p) / sb


def arithmetic():
    rows = []
    pts = [(1, 2, 3), (1, 0.25, -0.5), (2.5, 0.3, 0.4), (0.4, -3, 1.7), (1, 10, 10)]
    for beta, x, y in pts:
        b, x, y = mp.mpf(beta), mp.mpf(x), mp.mpf(y)
        rows.append({"beta": beta, "x": float(x), "y": float(y),
                     "oplus": float(oplus(b, x, y)), "ominus": float(oplus(b, x, -y)),
                     "circ_half": float(circ(b, mp.mpf(1) / 2, x)), "circ_third": float(circ(b, mp.mpf(1) / 3, y)),
                     "pairing": float(pairing(b, x, y))})
    return rows


# ---- sinc and the maximally localized Wigner function from its definition

def sinc(x):
    return mp.mpf(1) if x == 0 else mp.sin(mp.pi * x) / (mp.pi * x)


def ml_wigner(beta, hbar, lam, xi, q, p, literal=False):
    """W(psi, psi)(q, p) with psi the maximally localized state.

    The amplitude (1 + beta x^2)^(-1/2) is read as cos of the unwrapped angle
    arctan(sqrt(beta) p) + lambda abar, which changes sign past the poles. With
    literal=True it is evaluated at the real number p (+) lambda o p' instead,
    which gives |cos|. The phase uses bilinearity of the pairing. The p' integral
    runs over abar = arctan(sqrt(beta) p') with d mu = d abar / sqrt(beta).
    """
    b, h, lam, xi, q, p = (mp.mpf(v) for v in (beta, hbar, lam, xi, q, p))
    sb = mp.sqrt(b)
    a0 = mp.atan(sb * p)

    def amp(x):
        return mp.sqrt(2 * sb / mp.pi) / mp.sqrt(1 + b * x * x)

    def integrand(abar):
        pp = mp.tan(abar) / sb
        if literal:
            right = oplus(b, p, circ(b, lam, pp))
            left = oplus(b, p, -circ(b, 1 - lam, pp))
            a = amp(left) * amp(right)
        else:
            a = 2 * sb / mp.pi * mp.cos(a0 - (1 - lam) * abar) * mp.cos(a0 + lam * abar)
        return a * mp.expj(pairing(b, q - xi, pp) / h) / sb

    breaks = {-mp.pi / 2, mp.pi / 2}
    if literal and p != 0:
        for mu, sign in ((lam, 1), (1 - lam, -1)):
            if mu > 0:
                a = sign * mp.atan(1 / (sb * p)) / mu
                if abs(a) < mp.pi / 2:
                    breaks.add(a)
    return mp.quad(integrand, sorted(breaks))


def ml_points(literal=False):
    rows = []
    qp = [(0, 0), (0.9, -1.3), (-2.2, 0.4), (3.1, 7.5)]
    for beta, hbar, lam, xi, (q, p) in itertools.product((1, 2.5), (1, 0.4), (0, 0.3, 0.5, 1), (0, 0.7), qp):
        rows.append({"beta": beta, "hbar": hbar, "lambda": lam, "xi": xi, "q": q, "p": p,
                     "value": c2j(ml_wigner(beta, hbar, lam, xi, q, p, literal))})
    return rows


def position_points():
    # rho_xi(q, p) = (1/pi) int_{-pi/2}^{pi/2} e^{i x a} da with x = (q - xi) / (hbar sqrt(beta))
    x, a = sp.symbols("x a", real=True)
    rho = sp.simplify(sp.integrate(sp.exp(sp.I * x * a), (a, -sp.pi / 2, sp.pi / 2)) / sp.pi)
    rows = []
    for beta, hbar, xi, q in [(1, 1, 0, 0.3), (1, 1, 0.5, 2.0), (2, 0.5, -1, 0.1), (1, 1, 0, 4.0), (0.5, 2, 1.2, -3.3)]:
        xv = sp.Rational(q - xi).limit_denominator(10**9) / (hbar * sp.sqrt(beta))
        val = complex(sp.N(rho.subs(x, xv) if xv != 0 else 1, 25))
        rows.append({"beta": beta, "hbar": hbar, "xi": xi, "q": q, "value": [val.real, val.imag]})
    return rows


# ---- formal star products as tensor words

q, p, beta, hbar, lam = sp.symbols("q p beta hbar lambda")
s = sp.sqrt(1 + beta * p**2)

PAIRS = {
    "main": (lambda f: sp.diff(f, q), lambda f: (1 + beta * p**2) * sp.diff(f, p)),
    "alt": (lambda f: sp.diff(f, q) / s, lambda f: -beta * q * p * s * sp.diff(f, q) + s**3 * sp.diff(f, p)),
}


def formal_star(pair, f, g, K):
    A, B = PAIRS[pair]
    # P = (1 - lam) A (x) B - lam B (x) A, expanded word by word
    letters = [((1 - lam), A, B), (-lam, B, A)]
    total = 0
    for k in range(K + 1):
        for word in itertools.product(letters, repeat=k):
            coef, lf, rg = 1, f, g
            for c, L, R in reversed(word):
                coef *= c
                lf, rg = L(lf), R(rg)
            total += (sp.I * hbar) ** k / sp.factorial(k) * coef * lf * rg
    return sp.expand(sp.simplify(total))


def poly_json(expr):
    terms = []
    for (a, b), c in sp.Poly(expr, q, p).terms():
        c = sp.Rational(c)
        terms.append([f"{c.p}/{c.q}", a, b])
    return terms


def formal_products():
    cases = [
        ("main", q, p, 3), ("main", p, q, 3), ("main", q, q, 3), ("main", p, p, 3),
        ("alt", q, q, 4), ("alt", q, p, 4), ("alt", p, p, 4),
        ("main", q**2 * p, q * p**2, 4), ("main", sp.Rational(3, 2) * q**3 + p, q * p - 2 * p**3, 4),
        ("alt", q * p, q**2, 4),
    ]
    points = [(0.3, -1.1, 1.0, 0.7, 0.25), (1.7, 0.4, 2.5, 0.2, 0.5), (-0.8, 2.2, 0.6, 1.3, 1.0)]
    rows = []
    for pair, f, g, K in cases:
        val = formal_star(pair, f, g, K)
        evals = [c2j(complex(sp.N(val.subs({q: a, p: b_, beta: c, hbar: d, lam: e}), 25)))
                 for a, b_, c, d, e in points]
        rows.append({"pair": pair, "f": poly_json(f), "g": poly_json(g), "K": K,
                     "points": [list(pt) for pt in points], "values": evals, "text": str(val)})
    return rows


def alt_qq_coefficient():
    val = formal_star("alt", q, q, 4)
    c2 = sp.factor(sp.expand(val).coeff(hbar, 2))
    return {"hbar2": str(c2), "ratio_to_printed": str(sp.simplify(c2 / (sp.Rational(1, 2) * lam * (1 - lam) * beta**2 * p**2)))}


def main():
    data = {
        "one_plus_two_over_pi": float(1 + 2 / mp.pi),
        "sqrt2_minus_1": float(mp.sqrt(2) - 1),
        "pi_over_4": float(mp.pi / 4),
        "sinc": [[x, float(sinc(mp.mpf(x)))] for x in (0, 0.5, 1, 1.5, -0.25, 2.75)],
        "arithmetic": arithmetic(),
        "ml_wigner": ml_points(),
        "ml_wigner_literal": ml_points(literal=True),
        "position": position_points(),
        "formal": formal_products(),
        "alt_qq": alt_qq_coefficient(),
    }
    OUT.write_text(json.dumps(data, indent=1) + "\n")


if __name__ == "__main__":
    main()
