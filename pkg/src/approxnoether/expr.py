"""Immutable symbolic expressions in the trig-polynomial normal form.

An :class:`Expr` is a finite sum of terms ``q * prod(params) * phi^p *
u^a up^b upp^c ... * trig`` where ``q`` is an exact rational, parameters and
jet variables carry integer (possibly negative) exponents, ``p >= 0`` and
``trig`` is absent or one of ``sin(m*phi)``, ``cos(m*phi)`` with ``m >= 1``.
Products of trig factors are always rewritten into this multiple-angle span,
so two expressions are equal exactly when their canonical term maps are.

The canonical form is a two-level tree: a sum node whose children are
product nodes with sorted factors and one leading rational.  It is stored as
a mapping ``Monomial -> Fraction`` which makes structural equality a dict
comparison.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Mapping, Union

PHI = "phi"
JETS = ("u", "up", "upp", "uppp", "upppp")
RESERVED = frozenset((PHI,) + JETS + ("sin", "cos"))

_NO_TRIG = (0, 0)
_COS = 1
_SIN = 2

Number = Union[int, Fraction]


class ExprError(ValueError):
    """Base class for expression construction and evaluation errors."""


class TrigArgumentError(ExprError):
    pass


class ExponentError(ExprError):
    pass


class DomainError(ExprError):
    pass


class UnboundSymbolError(ExprError):
    pass


# A monomial key: (params, jets, phi power, trig).
#   params: tuple of (name, exponent) sorted by name, exponents nonzero
#   jets:   5-tuple of exponents for u, up, upp, uppp, upppp
#   trig:   (0, 0) | (1, m) for cos(m phi) | (2, m) for sin(m phi)
_ZERO_JETS = (0, 0, 0, 0, 0)
_ONE_KEY = ((), _ZERO_JETS, 0, _NO_TRIG)


def _merge_params(a, b):
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for name, e in b:
        s = out.get(name, 0) + e
        if s:
            out[name] = s
        else:
            del out[name]
    return tuple(sorted(out.items()))


@lru_cache(maxsize=None)
def _trig_mul(t1, t2):
    """Product of two trig factors as ((coeff, trig), ...)."""
    if t1 == _NO_TRIG:
        return ((Fraction(1), t2),)
    if t2 == _NO_TRIG:
        return ((Fraction(1), t1),)
    (k1, a), (k2, b) = t1, t2
    half = Fraction(1, 2)
    if k1 == _COS and k2 == _COS:
        parts = ((half, _COS, a - b), (half, _COS, a + b))
    elif k1 == _SIN and k2 == _SIN:
        parts = ((half, _COS, a - b), (-half, _COS, a + b))
    elif k1 == _SIN:
        parts = ((half, _SIN, a + b), (half, _SIN, a - b))
    else:
        parts = ((half, _SIN, a + b), (half, _SIN, b - a))
    out = []
    for c, kind, m in parts:
        normal = _normal_trig(kind, m)
        if normal is not None:
            out.append((c * normal[0], normal[1]))
    return tuple(out)


def _normal_trig(kind, m):
    """Normalize trig(kind, m) for any integer m: returns (sign, trig) or None for zero."""
    if m == 0:
        return None if kind == _SIN else (1, _NO_TRIG)
    if m < 0:
        return (-1 if kind == _SIN else 1, (kind, -m))
    return (1, (kind, m))


def _mul_keys(k1, k2):
    p1, j1, f1, t1 = k1
    p2, j2, f2, t2 = k2
    params = _merge_params(p1, p2)
    jets = tuple(x + y for x, y in zip(j1, j2)) if j2 != _ZERO_JETS else j1
    phi = f1 + f2
    return [(c, (params, jets, phi, t)) for c, t in _trig_mul(t1, t2)]


def _coerce(value) -> "Expr":
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return Expr.const(value)
    if isinstance(value, str):
        from .parser import parse

        return parse(value)
    raise TypeError(f"cannot convert {type(value).__name__} to Expr")


class Expr:
    """Canonical symbolic expression; immutable and hashable."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | None = None):
        # Callers must pass canonical keys; zero coefficients are dropped here.
        if terms:
            self._terms = {k: c for k, c in terms.items() if c}
        else:
            self._terms = {}
        self._hash = None

    # ----- constructors -------------------------------------------------
    @classmethod
    def const(cls, value: Number) -> "Expr":
        value = Fraction(value)
        return cls({_ONE_KEY: value}) if value else cls()

    @classmethod
    def symbol(cls, name: str) -> "Expr":
        if name == PHI:
            return cls({((), _ZERO_JETS, 1, _NO_TRIG): Fraction(1)})
        if name in JETS:
            jets = [0] * len(JETS)
            jets[JETS.index(name)] = 1
            return cls({((), tuple(jets), 0, _NO_TRIG): Fraction(1)})
        if name in RESERVED:
            raise ExprError(f"{name!r} is not a symbol")
        return cls({(((name, 1),), _ZERO_JETS, 0, _NO_TRIG): Fraction(1)})

    @classmethod
    def trig(cls, kind: str, m: int) -> "Expr":
        """``sin(m*phi)`` or ``cos(m*phi)`` for integer ``m``."""
        code = {"sin": _SIN, "cos": _COS}[kind]
        normal = _normal_trig(code, int(m))
        if normal is None:
            return cls()
        sign, t = normal
        return cls({((), _ZERO_JETS, 0, t): Fraction(sign)})

    # ----- inspection ---------------------------------------------------
    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(k == _ONE_KEY for k in self._terms)

    def as_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ExprError(f"{self} is not a rational constant")
        return self._terms.get(_ONE_KEY, Fraction(0))

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def parameters(self) -> frozenset:
        return frozenset(n for k in self._terms for n, _ in k[0])

    def free_symbols(self) -> frozenset:
        names = set(self.parameters())
        for params, jets, phi, trig in self._terms:
            if phi or trig != _NO_TRIG:
                names.add(PHI)
            names.update(JETS[i] for i, e in enumerate(jets) if e)
        return frozenset(names)

    def has(self, name: str) -> bool:
        return name in self.free_symbols()

    def depends_on_phi(self) -> bool:
        return any(k[2] or k[3] != _NO_TRIG for k in self._terms)

    def max_jet_order(self) -> int:
        """Highest jet index present (0 for u, 1 for up, ...); -1 if none."""
        top = -1
        for _, jets, _, _ in self._terms:
            for i, e in enumerate(jets):
                if e and i > top:
                    top = i
        return top

    def degree(self, name: str) -> tuple[int, int]:
        """(min, max) exponent of a jet variable or parameter over all terms."""
        lo = hi = None
        for params, jets, phi, _ in self._terms:
            if name in JETS:
                e = jets[JETS.index(name)]
            elif name == PHI:
                e = phi
            else:
                e = dict(params).get(name, 0)
            lo = e if lo is None else min(lo, e)
            hi = e if hi is None else max(hi, e)
        return (lo or 0, hi or 0)

    # ----- arithmetic ---------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return Expr._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Expr._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Expr()
            return Expr._raw({k: c * other for k, c in self._terms.items()})
        other = _coerce(other)
        if not self._terms or not other._terms:
            return Expr()
        if len(other._terms) == 1 and _ONE_KEY in other._terms:
            return self * other._terms[_ONE_KEY]
        out: dict = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                c12 = c1 * c2
                for c, k in _mul_keys(k1, k2):
                    s = out.get(k, 0) + c * c12
                    if s:
                        out[k] = s
                    else:
                        out.pop(k, None)
        return Expr._raw(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * _coerce(other).inverse()

    def __rtruediv__(self, other):
        return _coerce(other) * self.inverse()

    def inverse(self) -> "Expr":
        """Reciprocal of a single-term expression free of phi."""
        if len(self._terms) != 1:
            raise DomainError(f"cannot invert non-monomial expression {self}")
        (key, c), = self._terms.items()
        params, jets, phi, trig = key
        if phi or trig != _NO_TRIG:
            raise DomainError(f"cannot invert phi-dependent factor {self}")
        key = (tuple((n, -e) for n, e in params), tuple(-e for e in jets), 0, _NO_TRIG)
        return Expr._raw({key: 1 / c})

    def __pow__(self, n):
        if isinstance(n, Fraction):
            if n.denominator != 1:
                raise ExponentError(f"non-integer exponent {n}")
            n = n.numerator
        if not isinstance(n, int):
            raise ExponentError(f"non-integer exponent {n!r}")
        if n < 0:
            return self.inverse() ** (-n)
        result = Expr.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    @classmethod
    def _raw(cls, terms):
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    # ----- equality -----------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Expr.const(other)
        if not isinstance(other, Expr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        return f"Expr({print_canonical(self)!r})"

    def __str__(self):
        return print_canonical(self)

    # ----- term-level helpers ---------------------------------------------
    def map_terms(self, fn: Callable) -> "Expr":
        """Rebuild from ``fn(key, coeff) -> iterable of (key, coeff)``."""
        out: dict = {}
        for k, c in self._terms.items():
            for k2, c2 in fn(k, c):
                s = out.get(k2, 0) + c2
                if s:
                    out[k2] = s
                else:
                    out.pop(k2, None)
        return Expr._raw(out)

    def filter_terms(self, keep: Callable) -> "Expr":
        return Expr._raw({k: c for k, c in self._terms.items() if keep(k)})


# ----------------------------------------------------------------------
# printing

def _sort_key(key):
    params, jets, phi, (kind, m) = key
    return (tuple(reversed(jets)), phi, m, kind, tuple((n, e) for n, e in params))


def _pow_str(name, e):
    if e == 1:
        return name
    if e < 0:
        return f"{name}^({e})"
    return f"{name}^{e}"


def _factors(key) -> list[str]:
    params, jets, phi, (kind, m) = key
    out = [_pow_str(n, e) for n, e in params]
    if phi:
        out.append(_pow_str(PHI, phi))
    out.extend(_pow_str(JETS[i], e) for i, e in enumerate(jets) if e)
    if kind:
        fn = "cos" if kind == _COS else "sin"
        out.append(f"{fn}(phi)" if m == 1 else f"{fn}({m}*phi)")
    return out


def _coeff_str(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"({c.numerator}/{c.denominator})"


def _term_str(key, c: Fraction) -> str:
    """Print a term with a nonnegative coefficient."""
    factors = _factors(key)
    if not factors:
        return _coeff_str(c)
    if c == 1:
        return "*".join(factors)
    return "*".join([_coeff_str(c)] + factors)


def sorted_terms(e: Expr) -> list:
    """Terms in canonical print order."""
    return sorted(e.items(), key=lambda kc: _sort_key(kc[0]), reverse=True)


def print_canonical(e: Expr) -> str:
    """Deterministic text form accepted back by :func:`parse`."""
    if e.is_zero:
        return "0"
    parts = []
    for i, (key, c) in enumerate(sorted_terms(e)):
        body = _term_str(key, abs(c))
        if i == 0:
            parts.append("-" + body if c < 0 else body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)


def simplify(e) -> Expr:
    """Canonical form of ``e``.

    Expressions are canonicalized on construction, so this only coerces
    strings and numbers; it is idempotent by construction.
    """
    return _coerce(e)


# ----------------------------------------------------------------------
# calculus

def _jet_index(v: str) -> int:
    return JETS.index(v)


def diff_partial(e: Expr, v: str) -> Expr:
    """Partial derivative treating phi, jets and parameters as independent."""
    e = _coerce(e)
    if v == PHI:
        return e.map_terms(_dphi_term)
    if v in JETS:
        i = _jet_index(v)

        def dj(key, c):
            params, jets, phi, trig = key
            n = jets[i]
            if not n:
                return ()
            jets = jets[:i] + (n - 1,) + jets[i + 1:]
            return (((params, jets, phi, trig), c * n),)

        return e.map_terms(dj)
    if v in RESERVED:
        raise ExprError(f"cannot differentiate with respect to {v!r}")

    def dp(key, c):
        params, jets, phi, trig = key
        d = dict(params)
        n = d.get(v, 0)
        if not n:
            return ()
        if n == 1:
            del d[v]
        else:
            d[v] = n - 1
        return (((tuple(sorted(d.items())), jets, phi, trig), c * n),)

    return e.map_terms(dp)


def _dphi_term(key, c):
    params, jets, phi, trig = key
    out = []
    if phi:
        out.append(((params, jets, phi - 1, trig), c * phi))
    kind, m = trig
    if kind == _COS:
        out.append(((params, jets, phi, (_SIN, m)), -c * m))
    elif kind == _SIN:
        out.append(((params, jets, phi, (_COS, m)), c * m))
    return out


def total_derivative(e: Expr) -> Expr:
    """D_phi = d/dphi + up d/du + upp d/dup + uppp d/dupp + upppp d/duppp."""
    e = _coerce(e)
    top = e.max_jet_order()
    if top >= len(JETS) - 1:
        raise ExprError("total derivative would exceed the jet range (upppp)")

    def dt(key, c):
        out = list(_dphi_term(key, c))
        params, jets, phi, trig = key
        for i in range(len(JETS) - 1):
            n = jets[i]
            if n:
                nj = list(jets)
                nj[i] -= 1
                nj[i + 1] += 1
                out.append(((params, tuple(nj), phi, trig), c * n))
        return out

    return e.map_terms(dt)


# ----------------------------------------------------------------------
# substitution and evaluation

def substitute(e: Expr, bindings: Mapping[str, object]) -> Expr:
    """Simultaneous substitution of symbols, followed by canonicalization.

    A binding for ``phi`` must itself be an integer multiple of ``phi`` when
    ``e`` contains trig factors.
    """
    e = _coerce(e)
    if not bindings:
        return e
    b = {name: _coerce(val) for name, val in bindings.items()}
    phi_scale = None
    if PHI in b:
        phi_scale = _phi_multiple(b[PHI])
    cache: dict = {}

    def power(name, n):
        k = (name, n)
        if k not in cache:
            cache[k] = b[name] ** n
        return cache[k]

    result = Expr()
    for (params, jets, phi, trig), c in e.items():
        kept = []
        factor = Expr.const(c)
        for name, n in params:
            if name in b:
                factor = factor * power(name, n)
            else:
                kept.append((name, n))
        kept_jets = list(jets)
        for i, n in enumerate(jets):
            if n and JETS[i] in b:
                factor = factor * power(JETS[i], n)
                kept_jets[i] = 0
        kind, m = trig
        if PHI in b:
            if phi:
                factor = factor * power(PHI, phi)
            if kind:
                if phi_scale is None:
                    raise TrigArgumentError(
                        f"substituting phi -> {b[PHI]} puts a non-phi argument inside trig")
                factor = factor * Expr.trig("cos" if kind == _COS else "sin", m * phi_scale)
            phi, trig = 0, _NO_TRIG
        rest = Expr._raw({(tuple(kept), tuple(kept_jets), phi, trig): Fraction(1)})
        result = result + factor * rest
    return result


def _phi_multiple(x: Expr):
    if x.is_zero:
        return 0
    if len(x) == 1:
        (key, c), = x.items()
        if key == ((), _ZERO_JETS, 1, _NO_TRIG) and c.denominator == 1:
            return c.numerator
    return None


def eval_numeric(e: Expr, assignment: Mapping[str, float]) -> float:
    """IEEE double evaluation; every symbol in ``e`` must be bound."""
    e = _coerce(e)
    total = 0.0
    for (params, jets, phi, (kind, m)), c in e.items():
        try:
            v = float(c)
            for name, n in params:
                v *= _lookup(assignment, name) ** n
            for i, n in enumerate(jets):
                if n:
                    v *= _lookup(assignment, JETS[i]) ** n
            if phi or kind:
                x = _lookup(assignment, PHI)
                if phi:
                    v *= x ** phi
                if kind == _COS:
                    v *= math.cos(m * x)
                elif kind == _SIN:
                    v *= math.sin(m * x)
        except ZeroDivisionError as exc:
            raise DomainError(f"division by zero evaluating {e}") from exc
        total += v
    return total


def _lookup(assignment, name):
    try:
        return float(assignment[name])
    except KeyError:
        raise UnboundSymbolError(f"symbol {name!r} is unbound") from None


def lambdify(e: Expr, args: Iterable[str] = (PHI, "u", "up"),
             constants: Mapping[str, float] | None = None, module=math) -> Callable:
    """Compile ``e`` to a Python function of ``args``.

    Symbols not in ``args`` are taken from ``constants``.  Passing ``numpy``
    as ``module`` gives an array-friendly function.
    """
    e = _coerce(e)
    args = tuple(args)
    constants = dict(constants or {})
    pieces = []
    for (params, jets, phi, (kind, m)), c in e.items():
        val = float(c)
        factors = []
        for name, n in params:
            if name in args:
                factors.append(f"{name}**{n}")
            else:
                val *= _lookup(constants, name) ** n
        for i, n in enumerate(jets):
            if n:
                name = JETS[i]
                if name in args:
                    factors.append(f"{name}**{n}" if n != 1 else name)
                else:
                    val *= _lookup(constants, name) ** n
        if phi or kind:
            if PHI in args:
                if phi:
                    factors.append(f"{PHI}**{phi}" if phi != 1 else PHI)
                if kind:
                    fn = "_cos" if kind == _COS else "_sin"
                    factors.append(f"{fn}({m}*{PHI})")
            else:
                x = _lookup(constants, PHI)
                val *= x ** phi
                if kind:
                    val *= math.cos(m * x) if kind == _COS else math.sin(m * x)
        pieces.append("*".join([repr(val)] + factors))
    body = " + ".join(pieces) if pieces else "0.0"
    if not pieces:
        body = f"0.0*{args[0]}" if args else "0.0"
    src = f"lambda {', '.join(args)}: {body}"
    return eval(src, {"_sin": module.sin, "_cos": module.cos})


# ----------------------------------------------------------------------
# series helpers (perturbation parameter kept as an ordinary symbol)

def series_coefficient(e: Expr, name: str, n: int) -> Expr:
    """Coefficient of ``name**n`` in ``e``."""

    def pick(key, c):
        params, jets, phi, trig = key
        d = dict(params)
        if d.get(name, 0) != n:
            return ()
        d.pop(name, None)
        return (((tuple(sorted(d.items())), jets, phi, trig), c),)

    return _coerce(e).map_terms(pick)


def truncate(e: Expr, name: str, order: int) -> Expr:
    """Drop terms whose power of ``name`` exceeds ``order``."""
    return _coerce(e).filter_terms(lambda k: dict(k[0]).get(name, 0) <= order)


def sum_exprs(items: Iterable) -> Expr:
    out: dict = {}
    for x in items:
        for k, c in _coerce(x).items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return Expr._raw(out)


def iter_factors(e: Expr) -> Iterator[tuple[Fraction, list[str]]]:
    """(coefficient, factor strings) per term in print order: the product nodes."""
    for key, c in sorted_terms(e):
        yield c, _factors(key)


ZERO = Expr()
ONE = Expr.const(1)
