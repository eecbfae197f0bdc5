"""Truncated q-series with rational exponents and rational coefficients."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Tuple

Number = int | Fraction


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass an exact rational")
    return Fraction(x)


class QSeries:
    """Finite map exponent -> coefficient, exact strictly below ``trunc``.

    ``trunc=None`` marks an exact (Laurent polynomial) series.  Terms at or
    above ``trunc`` are never stored.
    """

    __slots__ = ("terms", "trunc")

    def __init__(self, terms: Mapping | Iterable[Tuple] | None = None, trunc=None):
        self.trunc: Optional[Fraction] = None if trunc is None else _frac(trunc)
        items = terms.items() if isinstance(terms, Mapping) else (terms or ())
        out: Dict[Fraction, Fraction] = {}
        for e, c in items:
            e = _frac(e)
            if self.trunc is not None and e >= self.trunc:
                continue
            out[e] = out.get(e, Fraction(0)) + _frac(c)
        self.terms = {e: c for e, c in out.items() if c}

    # -- construction -----------------------------------------------------------
    @classmethod
    def monomial(cls, exp, coef=1, trunc=None) -> "QSeries":
        return cls({exp: coef}, trunc)

    @classmethod
    def from_list(cls, coefs, start=0, trunc=None) -> "QSeries":
        """Series sum_k coefs[k] q^(start+k)."""
        return cls({_frac(start) + k: c for k, c in enumerate(coefs)}, trunc)

    # -- queries ------------------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def items(self):
        return sorted(self.terms.items())

    def coeff(self, e) -> Fraction:
        e = _frac(e)
        if self.trunc is not None and e >= self.trunc:
            raise ValueError(f"exponent {e} is at or beyond the truncation {self.trunc}")
        return self.terms.get(e, Fraction(0))

    def min_exp(self) -> Optional[Fraction]:
        return min(self.terms) if self.terms else None

    def max_exp(self) -> Optional[Fraction]:
        return max(self.terms) if self.terms else None

    def exponent_denominator(self) -> int:
        from math import lcm
        d = 1
        for e in self.terms:
            d = lcm(d, e.denominator)
        return d

    def horizon(self) -> Optional[Fraction]:
        """trunc - min_exp: the depth to which this series is known."""
        if self.trunc is None:
            return None
        m = self.min_exp()
        return None if m is None else self.trunc - m

    # -- arithmetic -----------------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.terms == other.terms and self.trunc == other.trunc

    def __hash__(self):
        return hash((tuple(sorted(self.terms.items())), self.trunc))

    def __neg__(self) -> "QSeries":
        return QSeries({e: -c for e, c in self.terms.items()}, self.trunc)

    def __add__(self, other) -> "QSeries":
        return series_add(self, other)

    def __sub__(self, other) -> "QSeries":
        return series_add(self, -other)

    def __mul__(self, other) -> "QSeries":
        if isinstance(other, QSeries):
            return series_mul(self, other)
        c = _frac(other)
        return QSeries({e: v * c for e, v in self.terms.items()}, self.trunc)

    __rmul__ = __mul__

    def shift(self, s) -> "QSeries":
        """Multiply by q^s."""
        s = _frac(s)
        return QSeries({e + s: c for e, c in self.terms.items()}, None if self.trunc is None else self.trunc + s)

    def truncate(self, t) -> "QSeries":
        t = _frac(t)
        if self.trunc is not None and self.trunc < t:
            t = self.trunc
        return QSeries(self.terms, t)

    # -- rendering -------------------------------------------------------------------
    def __repr__(self) -> str:
        return f"QSeries({self.render()})"

    def render(self, var: str = "q", max_terms: Optional[int] = None) -> str:
        if not self.terms:
            body = "0"
        else:
            parts = []
            for i, (e, c) in enumerate(self.items()):
                if max_terms is not None and i >= max_terms:
                    break
                sign = "-" if c < 0 else "+"
                a = abs(c)
                if e == 0:
                    mono = str(a)
                else:
                    pw = "" if e == 1 else f"^{e}" if e.denominator == 1 and e > 0 else f"^({e})"
                    mono = (f"{var}{pw}" if a == 1 else f"{a}*{var}{pw}")
                parts.append(f"{sign}{mono}")
            body = " ".join(parts)
            if body.startswith("+"):
                body = body[1:]
        if self.trunc is not None:
            body += f" + O({var}^{self.trunc})" if self.trunc.denominator == 1 else f" + O({var}^({self.trunc}))"
        return body

    def to_json(self) -> dict:
        return {
            "terms": [
                {"exp_num": e.numerator, "exp_den": e.denominator, "coef_num": c.numerator, "coef_den": c.denominator}
                for e, c in self.items()
            ],
            "trunc": None if self.trunc is None else [self.trunc.numerator, self.trunc.denominator],
        }

    @classmethod
    def from_json(cls, data) -> "QSeries":
        if isinstance(data, str):
            data = json.loads(data)
        tr = data.get("trunc")
        terms = {Fraction(t["exp_num"], t["exp_den"]): Fraction(t["coef_num"], t["coef_den"]) for t in data["terms"]}
        return cls(terms, None if tr is None else Fraction(tr[0], tr[1]))


def _min_trunc(a: Optional[Fraction], b: Optional[Fraction]) -> Optional[Fraction]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def series_add(a: QSeries, b: QSeries) -> QSeries:
    terms = dict(a.terms)
    for e, c in b.terms.items():
        terms[e] = terms.get(e, Fraction(0)) + c
    return QSeries(terms, _min_trunc(a.trunc, b.trunc))


def series_mul(a: QSeries, b: QSeries) -> QSeries:
    """Cauchy product; the result is exact below min(a.trunc + min b, b.trunc + min a)."""
    if not a.terms or not b.terms:
        t = _min_trunc(
            None if a.trunc is None or not b.terms else a.trunc + b.min_exp(),
            None if b.trunc is None or not a.terms else b.trunc + a.min_exp(),
        )
        if t is None:
            t = _min_trunc(a.trunc, b.trunc)
        return QSeries({}, t)
    ta = None if a.trunc is None else a.trunc + b.min_exp()
    tb = None if b.trunc is None else b.trunc + a.min_exp()
    trunc = _min_trunc(ta, tb)
    out: Dict[Fraction, Fraction] = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            e = ea + eb
            if trunc is not None and e >= trunc:
                continue
            out[e] = out.get(e, Fraction(0)) + ca * cb
    return QSeries(out, trunc)


def normalize_cong(a: QSeries):
    """Divide by sign * q^shift so the lowest term is +c q^0.

    Returns ``(normalized, shift, sign)``; an all-zero series returns
    ``(a, None, 0)``.  Rational scalars are not absorbed.
    """
    if not a.terms:
        return a, None, 0
    shift = a.min_exp()
    sign = 1 if a.terms[shift] > 0 else -1
    return a.shift(-shift) * sign, shift, sign


@dataclass
class CongResult:
    equal: Optional[bool]      # None means incomparable
    horizon: Optional[Fraction]

    def __bool__(self) -> bool:
        return bool(self.equal)


def equal_cong(a: QSeries, b: QSeries) -> CongResult:
    """Compare up to sign and overall power of q on the common known range."""
    na, _, _ = normalize_cong(a)
    nb, _, _ = normalize_cong(b)
    if not na.terms or not nb.terms:
        if not na.terms and not nb.terms:
            return CongResult(True, None)
        return CongResult(None, Fraction(0))
    horizon = _min_trunc(na.trunc, nb.trunc)
    if horizon is not None and horizon <= 0:
        return CongResult(None, horizon)
    keys = set(na.terms) | set(nb.terms)
    if horizon is not None:
        keys = {k for k in keys if k < horizon}
    ok = all(na.terms.get(k, 0) == nb.terms.get(k, 0) for k in keys)
    return CongResult(ok, horizon)


def parse_series(text: str, var: str = "q") -> QSeries:
    """Parse printed series like ``1 -q -q^5 +2q^{10} -q^(3/2) - ...``.

    A trailing ``...``/``\\cdots`` sets the truncation just above the last
    printed exponent, since the printed list is complete up to that term.
    """
    import re

    s = text.replace("\\cdots", "...").replace("−", "-").replace("{", "(").replace("}", ")").replace(" ", "")
    open_ended = s.endswith("...") or s.endswith("+...") or s.endswith("-...")
    s = s.rstrip(".").rstrip("+-")
    tok = re.compile(rf"([+-]?)(\d+(?:/\d+)?)?\*?(?:({var})(?:\^\(?(-?\d+(?:/\d+)?)\)?)?)?")
    terms: Dict[Fraction, Fraction] = {}
    pos = 0
    while pos < len(s):
        m = tok.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse series at {s[pos:]!r}")
        sign, num, v, ex = m.groups()
        c = Fraction(num) if num else Fraction(1)
        if sign == "-":
            c = -c
        e = Fraction(ex) if ex else (Fraction(1) if v else Fraction(0))
        terms[e] = terms.get(e, Fraction(0)) + c
        pos = m.end()
    trunc = (max(terms) + Fraction(1, 10**6)) if open_ended and terms else None
    return QSeries(terms, trunc)
