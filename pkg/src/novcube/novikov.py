"""Exact scalar arithmetic in the Novikov ring and field.

A scalar is a finite sum of terms ``c * T^e`` with rational coefficient
``c`` and rational exponent ``e``, optionally known only modulo ``T^R``
for a rational working precision ``R``.  Exponents are kept exact: every
finite computation here involves finitely many exponents, so rationals
suffice and all comparisons are decidable.

The nonnegative part (all exponents >= 0) is a valuation ring; its
fraction field is obtained by allowing negative exponents.  ``val`` is
the minimum exponent, with ``val(0) = +inf``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Optional, Tuple, Union

INFINITY = math.inf

RationalLike = Union[int, str, Fraction]


class NegativeValuation(ValueError):
    """Raised when an operation requires valuation >= 0 and it is not."""


class ZeroDivisor(ZeroDivisionError):
    """Raised when inverting a scalar that is zero at the working precision."""


class PrecisionExhausted(ArithmeticError):
    """Raised when the stored precision is too coarse to answer a question."""


def rat(x: RationalLike) -> Fraction:
    """Coerce ints, 'p/q' strings and Fractions to an exact rational."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


class NovikovScalar:
    """Immutable finite T-series with optional precision.

    ``terms`` is a tuple of ``(exponent, coefficient)`` pairs with strictly
    increasing exponents and nonzero coefficients.  ``mod`` is ``None`` for
    an exact scalar, or a rational ``R`` meaning the scalar is only known
    modulo ``T^R`` (all stored exponents are then < R).
    """

    __slots__ = ("terms", "mod")

    def __init__(self, terms: Iterable[Tuple[Fraction, Fraction]] = (),
                 mod: Optional[Fraction] = None):
        merged: dict = {}
        for e, c in terms:
            e = rat(e)
            c = rat(c)
            merged[e] = merged.get(e, Fraction(0)) + c
        if mod is not None:
            mod = rat(mod)
        pairs = sorted((e, c) for e, c in merged.items()
                       if c != 0 and (mod is None or e < mod))
        object.__setattr__(self, "terms", tuple(pairs))
        object.__setattr__(self, "mod", mod)

    def __setattr__(self, *a):
        raise AttributeError("NovikovScalar is immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero() -> "NovikovScalar":
        return NovikovScalar()

    @staticmethod
    def one() -> "NovikovScalar":
        return NovikovScalar([(Fraction(0), Fraction(1))])

    @staticmethod
    def rational(c: RationalLike) -> "NovikovScalar":
        return NovikovScalar([(Fraction(0), rat(c))])

    @staticmethod
    def monomial(c: RationalLike, e: RationalLike) -> "NovikovScalar":
        return NovikovScalar([(rat(e), rat(c))])

    # -- basic queries ---------------------------------------------------

    @property
    def is_zero(self) -> bool:
        """True when no term is stored (exact zero, or zero at precision)."""
        return not self.terms

    @property
    def is_exact(self) -> bool:
        return self.mod is None

    def val(self):
        """Minimum stored exponent; +inf for (apparent) zero."""
        if not self.terms:
            return INFINITY
        return self.terms[0][0]

    def val_floor(self):
        """A lower bound for the true valuation, honouring precision.

        For a scalar with no stored terms but finite precision ``R`` the
        true value may be any element of ``T^R * (ring)``, so the floor is
        ``R`` rather than +inf.
        """
        if self.terms:
            return self.terms[0][0]
        if self.mod is not None:
            return self.mod
        return INFINITY

    def coefficient(self, e: RationalLike) -> Fraction:
        e = rat(e)
        for ee, c in self.terms:
            if ee == e:
                return c
            if ee > e:
                break
        return Fraction(0)

    # -- ring structure ----------------------------------------------------

    def _joint_mod(self, other: "NovikovScalar"):
        mods = [m for m in (self.mod, other.mod) if m is not None]
        return min(mods) if mods else None

    def __add__(self, other: "NovikovScalar") -> "NovikovScalar":
        if not isinstance(other, NovikovScalar):
            return NotImplemented
        return NovikovScalar(self.terms + other.terms, self._joint_mod(other))

    def __neg__(self) -> "NovikovScalar":
        return NovikovScalar([(e, -c) for e, c in self.terms], self.mod)

    def __sub__(self, other: "NovikovScalar") -> "NovikovScalar":
        return self + (-other)

    def __mul__(self, other: "NovikovScalar") -> "NovikovScalar":
        if not isinstance(other, NovikovScalar):
            return NotImplemented
        mods = []
        if self.mod is not None and other.val_floor() is not INFINITY:
            mods.append(self.mod + other.val_floor())
        if other.mod is not None and self.val_floor() is not INFINITY:
            mods.append(other.mod + self.val_floor())
        mod = min(mods) if mods else None
        prods = [(e1 + e2, c1 * c2)
                 for e1, c1 in self.terms for e2, c2 in other.terms]
        return NovikovScalar(prods, mod)

    def scale(self, c: RationalLike) -> "NovikovScalar":
        c = rat(c)
        return NovikovScalar([(e, c * cc) for e, cc in self.terms], self.mod)

    def shift(self, e: RationalLike) -> "NovikovScalar":
        """Multiply by the monomial T^e."""
        e = rat(e)
        mod = None if self.mod is None else self.mod + e
        return NovikovScalar([(ee + e, c) for ee, c in self.terms], mod)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NovikovScalar):
            return NotImplemented
        return self.terms == other.terms and self.mod == other.mod

    def __hash__(self):
        return hash((self.terms, self.mod))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return "NovikovScalar(%s)" % format_scalar(self)

    # -- quotient-ring operations -----------------------------------------

    def truncate(self, r: RationalLike) -> "NovikovScalar":
        """Reduce modulo T^r, i.e. drop terms with exponent >= r.

        The result records precision ``min(r, existing)``.
        """
        r = rat(r)
        if r <= 0:
            raise ValueError("truncation precision must be positive")
        mod = r if self.mod is None else min(r, self.mod)
        return NovikovScalar(self.terms, mod)

    def reduce_t0(self) -> Fraction:
        """Constant term, defined on scalars of nonnegative valuation."""
        if self.terms and self.terms[0][0] < 0:
            raise NegativeValuation(
                "reduce_t0 needs val >= 0, got %s" % (self.terms[0][0],))
        if self.mod is not None and self.mod <= 0:
            raise PrecisionExhausted("constant term not determined at precision")
        return self.coefficient(0)

    def invert(self, work: Optional[RationalLike] = None) -> "NovikovScalar":
        """Multiplicative inverse, modulo T^work after valuation shift.

        Factors ``x = c T^v (1 + n)`` with val(n) > 0 and expands the
        geometric series for ``(1+n)^{-1}``, truncated at ``work``.  For a
        monomial the series terminates and ``work`` may be omitted.
        """
        if not self.terms:
            raise ZeroDivisor("cannot invert zero (at this precision)")
        v, c = self.terms[0]
        # known precision of 1 + n, after factoring out c T^v
        avail = INFINITY if self.mod is None else self.mod - v
        w = avail if work is None else min(rat(work), avail)
        n = NovikovScalar([(e - v, cc / c) for e, cc in self.terms[1:]])
        if not n.terms:
            unit = NovikovScalar.one()
            if self.mod is None:
                w = INFINITY  # exact monomial: the inverse is exact
        elif w is INFINITY:
            raise ValueError("working precision required: inverse is an "
                             "infinite series")
        else:
            unit = NovikovScalar.one()
            power = NovikovScalar.one()
            step = n.val()
            k = 1
            while k * step < w:
                power = (power * n).truncate(w)
                unit = unit + (-power if k % 2 else power)
                k += 1
            unit = unit.truncate(w)
        out_mod = None if w is INFINITY else w - v
        return NovikovScalar([(e - v, cc / c) for e, cc in unit.terms], out_mod)


ZERO = NovikovScalar.zero()
ONE = NovikovScalar.one()


# -- serialization ---------------------------------------------------------

_TERM_RE = re.compile(
    r"^\s*(?P<coeff>[+-]?\d+(?:/\d+)?)\s*\*\s*T\^(?:\{(?P<be>-?\d+(?:/\d+)?)\}|(?P<e>-?\d+(?:/\d+)?))\s*$")


def format_exponent(e: Fraction) -> str:
    return str(e) if e.denominator == 1 else "{%s}" % e


def format_scalar(x: NovikovScalar) -> str:
    """Canonical text form, e.g. ``3*T^0 + -1/2*T^{1/3} mod T^{3/2}``."""
    if not x.terms:
        body = "0"
    else:
        body = " + ".join("%s*T^%s" % (c, format_exponent(e))
                          for e, c in x.terms)
    if x.mod is not None:
        body += " mod T^%s" % format_exponent(x.mod)
    return body


def parse_scalar(text: str) -> NovikovScalar:
    """Inverse of :func:`format_scalar`.  Also accepts bare rationals."""
    text = text.strip()
    mod = None
    if " mod " in text:
        text, modpart = text.split(" mod ", 1)
        modpart = modpart.strip()
        if not modpart.startswith("T^"):
            raise ValueError("malformed precision suffix: %r" % modpart)
        mod = rat(modpart[2:].strip("{}"))
    if text.strip() == "0":
        return NovikovScalar((), mod)
    terms = []
    for chunk in text.split(" + "):
        m = _TERM_RE.match(chunk)
        if m:
            e = m.group("be") or m.group("e")
            terms.append((rat(e), rat(m.group("coeff"))))
            continue
        # bare rational, meaning c*T^0
        try:
            terms.append((Fraction(0), rat(chunk.strip())))
        except ValueError:
            raise ValueError("cannot parse scalar term: %r" % chunk)
    return NovikovScalar(terms, mod)


def scalar_to_json(x: NovikovScalar):
    """JSON form: list of term records, wrapped when a precision is set."""
    arr = [{"num": c.numerator, "den": c.denominator,
            "exp_num": e.numerator, "exp_den": e.denominator}
           for e, c in x.terms]
    if x.mod is None:
        return arr
    return {"terms": arr, "mod": str(x.mod)}


def scalar_from_json(data) -> NovikovScalar:
    if isinstance(data, dict):
        mod = data.get("mod")
        return NovikovScalar(
            [(Fraction(t["exp_num"], t["exp_den"]), Fraction(t["num"], t["den"]))
             for t in data["terms"]],
            None if mod is None else rat(mod))
    return NovikovScalar(
        [(Fraction(t["exp_num"], t["exp_den"]), Fraction(t["num"], t["den"]))
         for t in data])
