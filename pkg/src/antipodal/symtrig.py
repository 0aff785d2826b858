"""Exact polynomials over Q[c, s]/(c^2 + s^2 - 1) with free variables x, y.

``c`` and ``s`` stand for the cosine and sine of one angle.  Canonical form
replaces ``s^2`` by ``1 - c^2`` so every monomial has degree at most 1 in ``s``.
Coefficients are :class:`fractions.Fraction`; nothing here touches floats
except :meth:`TrigPoly.evaluate`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping

from .errors import AntipodalError


class IdentityFails(AntipodalError):
    pass


Monomial = tuple[int, int, int, int]  # powers of c, s, x, y


def _reduce(terms: Mapping[Monomial, Fraction]) -> dict[Monomial, Fraction]:
    out: dict[Monomial, Fraction] = {}
    stack = [(m, Fraction(v)) for m, v in terms.items() if v]
    while stack:
        (i, j, k, l), v = stack.pop()
        if j >= 2:
            # s^2 -> 1 - c^2
            stack.append(((i, j - 2, k, l), v))
            stack.append(((i + 2, j - 2, k, l), -v))
            continue
        m = (i, j, k, l)
        w = out.get(m, Fraction(0)) + v
        if w:
            out[m] = w
        else:
            out.pop(m, None)
    return out


class TrigPoly:
    """Immutable canonical element of the ring."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        object.__setattr__(self, "terms", _reduce({m: Fraction(v) for m, v in (terms or {}).items()}))

    def __setattr__(self, name, value):
        raise AttributeError("TrigPoly is immutable")

    @classmethod
    def const(cls, v) -> TrigPoly:
        return cls({(0, 0, 0, 0): v})

    def reduce(self) -> TrigPoly:
        return TrigPoly(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def _coerce(self, other) -> TrigPoly:
        return other if isinstance(other, TrigPoly) else TrigPoly.const(other)

    def __add__(self, other) -> TrigPoly:
        other = self._coerce(other)
        t = dict(self.terms)
        for m, v in other.terms.items():
            t[m] = t.get(m, Fraction(0)) + v
        return TrigPoly(t)

    __radd__ = __add__

    def __neg__(self) -> TrigPoly:
        return TrigPoly({m: -v for m, v in self.terms.items()})

    def __sub__(self, other) -> TrigPoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> TrigPoly:
        return self._coerce(other) - self

    def __mul__(self, other) -> TrigPoly:
        other = self._coerce(other)
        t: dict[Monomial, Fraction] = {}
        for (a1, b1, c1, d1), v1 in self.terms.items():
            for (a2, b2, c2, d2), v2 in other.terms.items():
                m = (a1 + a2, b1 + b2, c1 + c2, d1 + d2)
                t[m] = t.get(m, Fraction(0)) + v1 * v2
        return TrigPoly(t)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> TrigPoly:
        out = TrigPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return (self - self._coerce(other)).is_zero()

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"TrigPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, reverse=True):
            v = self.terms[m]
            names = [f"{n}^{p}" if p > 1 else n for n, p in zip("csxy", m) if p]
            body = "*".join(names)
            coef = str(v)
            parts.append(body if body and v == 1 else f"{coef}*{body}" if body else coef)
        return " + ".join(parts)

    def substitute(self, x: TrigPoly, y: TrigPoly) -> TrigPoly:
        """Replace the free variables by ring elements."""
        out = TrigPoly()
        for (i, j, k, l), v in self.terms.items():
            out = out + TrigPoly({(i, j, 0, 0): v}) * x**k * y**l
        return out

    def evaluate(self, c: float, s: float, x: float = 0.0, y: float = 0.0) -> float:
        return float(sum(float(v) * c**i * s**j * x**k * y**l for (i, j, k, l), v in self.terms.items()))

    def term_list(self) -> list:
        """``[[i, j, k, l, "p/q"], ...]`` in sorted monomial order."""
        return [[*m, str(self.terms[m])] for m in sorted(self.terms)]


C = TrigPoly({(1, 0, 0, 0): 1})
S = TrigPoly({(0, 1, 0, 0): 1})
X = TrigPoly({(0, 0, 1, 0): 1})
Y = TrigPoly({(0, 0, 0, 1): 1})
ONE = TrigPoly.const(1)


def ring_ops(a: TrigPoly, b: TrigPoly, op: str) -> TrigPoly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def lemma2_polys() -> tuple[TrigPoly, TrigPoly, TrigPoly]:
    """Numerators and denominator of the equal-angle normal form, inside the ring.

    ``Y`` uses ``(1 - c) cot(t/2)^2 = 1 + c`` and ``(1 - c) cot(t/2) = s`` to
    stay polynomial.
    """
    Xp = 2 * X * Y * C + (X * X - Y * Y - 1) * S
    Yp = (1 - C) * (X * X - 1) + 2 * S * X * Y + (1 + C) * Y * Y
    return Xp, Yp, 2 * Y


def _check(name: str, p: TrigPoly, report: dict):
    report["residuals"][name] = p.term_list()
    if not p.is_zero():
        raise IdentityFails(f"{name} does not vanish: {p}")


def verify_lemma2() -> dict:
    """Rebuild the equal-angle circumcenter map from two mediators and certify it.

    Rotations of angle t about ``(i, 0)``, ``i = +-1``, send ``p = (x, y)`` to
    ``b_i``; the mediator of ``p b_i`` is ``A_i xi + B_i psi + K_i = 0``.
    """
    u, v = C - 1, S
    report: dict = {"residuals": {}, "intermediates": {}}
    med = {}
    for i in (1, -1):
        bx = (X - i) * C - Y * S + i
        by = Y * C + (X - i) * S
        A, B = bx - X, by - Y
        K = -(bx * bx + by * by - X * X - Y * Y) * Fraction(1, 2)
        med[i] = (A, B, K)
        # transcribed mediator coefficients
        _check(f"mediator[{i}].xi", A - (X * u - Y * v - i * u), report)
        _check(f"mediator[{i}].psi", B - (Y * u + (X - i) * v), report)
        _check(f"mediator[{i}].const", K - (i * Y * v + u * (1 - i * X)), report)
    half = Fraction(1, 2)
    # rows a xi + b psi = r
    d_a, d_b, d_r = [(med[-1][k] - med[1][k]) * half for k in range(2)] + [-(med[-1][2] - med[1][2]) * half]
    s_a, s_b, s_r = [(med[1][k] + med[-1][k]) * half for k in range(2)] + [-(med[1][2] + med[-1][2]) * half]
    _check("half_difference.xi", d_a - u, report)
    _check("half_difference.psi", d_b - v, report)
    _check("half_difference.rhs", d_r - (-u * X + v * Y), report)
    _check("half_sum.xi", s_a - (u * X - v * Y), report)
    _check("half_sum.psi", s_b - (u * Y + v * X), report)
    _check("half_sum.rhs", s_r - (-u), report)
    det = d_a * s_b - d_b * s_a
    num_xi = d_r * s_b - d_b * s_r
    num_psi = d_a * s_r - d_r * s_a
    _check("determinant", det - (u * u + v * v) * Y, report)
    _check("u2_plus_v2", (u * u + v * v) - (2 - 2 * C), report)
    Xp, Yp, Lp = lemma2_polys()
    # xi = num_xi / det and det = (2 - 2c) y; (2y) xi = X after clearing 2 - 2c
    _check("xi", Lp * num_xi - Xp * det, report)
    _check("psi", Lp * num_psi - Yp * det, report)
    pm, pp = S * X + Y * (1 + C) - S, S * X + Y * (1 + C) + S
    _check("psi_factored", S * S * Yp - (1 - C) * pm * pp, report)
    report["intermediates"] = {
        "determinant": det.term_list(),
        "xi_numerator": num_xi.term_list(),
        "psi_numerator": num_psi.term_list(),
        "X": Xp.term_list(),
        "Y": Yp.term_list(),
        "L": Lp.term_list(),
    }
    report["verdict"] = "identically zero"
    return report


def solve_lemma2_numeric(theta: float, x: float, y: float) -> tuple[float, float]:
    """Circumcenter of ``p`` and its two rotated images, by the mediator system above."""
    u, v = math.cos(theta) - 1, math.sin(theta)
    det = (u * u + v * v) * y
    d_a, d_b, d_r = u, v, -u * x + v * y
    s_a, s_b, s_r = u * x - v * y, u * y + v * x, -u
    return (d_r * s_b - d_b * s_r) / det, (d_a * s_r - d_r * s_a) / det


def counterexample_points() -> tuple[tuple[TrigPoly, TrigPoly], tuple[TrigPoly, TrigPoly]]:
    return (C, -S), (-C - 2, S)


def verify_counterexample() -> dict:
    """Certify that the normal-form map sends both special points to ``(1, 0)``."""
    Xp, Yp, Lp = lemma2_polys()
    report: dict = {"residuals": {}, "denominators": {}}
    for name, (px, py), expected in zip(("p1", "p2"), counterexample_points(), (-2 * S, 2 * S)):
        xv, yv, lv = (q.substitute(px, py) for q in (Xp, Yp, Lp))
        _check(f"X({name}) - L({name})", xv - lv, report)
        _check(f"Y({name})", yv, report)
        if lv.is_zero() or not (lv - expected).is_zero():
            raise IdentityFails(f"denominator at {name} is {lv}")
        report["denominators"][name] = lv.term_list()
    report["q"] = [1, 0]
    report["verdict"] = "identically zero"
    return report


def involution_obstruction_demo(theta: float = math.pi / 2) -> dict:
    """Numeric face of the counterexample: two distinct points share the image ``q``."""
    from .zonemap import denominator_locus, lemma2_normal_form, tau_from_isometries
    from .unfold import PlanarIsometry

    m = lemma2_normal_form(theta)
    c, s = math.cos(theta), math.sin(theta)
    p1, p2 = (c, -s), (-c - 2, s)
    g1, g2 = m(*p1), m(*p2)
    # circle case: |G'| blows up approaching its denominator circle
    f1 = PlanarIsometry.rotation(math.pi / 2, (0.0, 0.0))
    fm1 = PlanarIsometry.rotation(math.pi / 3, (2.0, 0.0))
    mc = tau_from_isometries(f1, fm1)
    circ = denominator_locus(mc)
    (cx, cy), r = circ
    divergence = []
    for k in range(1, 9):
        eps = 10.0**-k
        px, py = cx + (r + eps) * math.cos(0.3), cy + (r + eps) * math.sin(0.3)
        gx, gy = mc(px, py)
        divergence.append([eps, math.hypot(gx, gy)])
    return {
        "theta": theta,
        "p1": list(p1),
        "p2": list(p2),
        "q": [1.0, 0.0],
        "G(p1)": list(g1),
        "G(p2)": list(g2),
        "distance_p1_p2": math.hypot(p1[0] - p2[0], p1[1] - p2[1]),
        "circle_case": {"center": [cx, cy], "radius": r, "offset_vs_norm": divergence},
    }
