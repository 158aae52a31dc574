"""Expression trees for analytic functions on the unit disk.

Small closed-form language: rational combinations and real powers of
polynomials in z, with real parameters (p, eps, alpha, q) allowed in
exponents.  Provides parsing, printing, evaluation with principal-branch
powers, cancellation-safe evaluation near boundary points, structural
detection of boundary zeros/singularities, Taylor coefficients, and the
substitutions z -> -z and z -> z^2.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Union

import numpy as np

__all__ = [
    "Expr", "Const", "Z", "Param", "Add", "Neg", "Mul", "Div", "Pow",
    "ParamEnv", "PARAM_NAMES",
    "ExprError", "ParseError", "EvalDomainError", "NotPolynomialError",
    "UnsupportedFormError",
    "parse", "to_string", "evaluate", "exponent_value",
    "substitute_negate", "substitute_square", "substitute_rotate",
    "boundary_singularities", "boundary_structure",
    "BoundaryStructure", "SingularPoint",
    "TaylorCoeffs", "to_polynomial",
    "BoundaryEvaluator", "check_param_env",
]

PARAM_NAMES = ("p", "eps", "alpha", "q")

ParamEnv = Mapping[str, float]

_TWO_PI = 2.0 * math.pi
_EPS = np.finfo(float).eps


class ExprError(ValueError):
    """Base class for expression-layer errors."""


class ParseError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class EvalDomainError(ExprError):
    """Division by zero, principal-branch violation, or unbound parameter."""


class NotPolynomialError(ExprError):
    """Raised by to_polynomial when the expression is not a polynomial in z."""


class UnsupportedFormError(ExprError):
    """Raised when boundary zeros of a singular factor cannot be found
    structurally."""


# ---------------------------------------------------------------------------
# AST node types


@dataclass(frozen=True)
class Const:
    value: complex


@dataclass(frozen=True)
class Z:
    pass


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Div:
    num: "Expr"
    den: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: "Expr"  # must not contain Z; resolved to a real at eval time


Expr = Union[Const, Z, Param, Add, Neg, Mul, Div, Pow]


def _contains_z(e: Expr) -> bool:
    if isinstance(e, Z):
        return True
    if isinstance(e, (Const, Param)):
        return False
    if isinstance(e, Neg):
        return _contains_z(e.operand)
    if isinstance(e, (Add, Mul)):
        return _contains_z(e.left) or _contains_z(e.right)
    if isinstance(e, Div):
        return _contains_z(e.num) or _contains_z(e.den)
    if isinstance(e, Pow):
        return _contains_z(e.base) or _contains_z(e.exponent)
    raise TypeError(f"not an Expr node: {e!r}")


def check_param_env(env: Optional[ParamEnv]) -> dict:
    """Validate parameter values: finite reals, and p > 0 when bound."""
    env = dict(env) if env else {}
    for name, val in env.items():
        v = float(val)
        if not math.isfinite(v):
            raise EvalDomainError(f"parameter {name!r} must be finite, got {val!r}")
        env[name] = v
    if "p" in env and env["p"] <= 0.0:
        raise EvalDomainError(f"parameter 'p' must be positive, got {env['p']}")
    return env


# ---------------------------------------------------------------------------
# Parsing

_NUM_RE = re.compile(r"(\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        if self.pos >= len(self.text):
            return ""
        return self.text[self.pos]

    def take(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def expect(self, ch: str) -> None:
        if not self.take(ch):
            got = self.peek() or "end of input"
            raise ParseError(f"expected {ch!r}, found {got!r}", self.pos)

    def number(self) -> Optional[float]:
        self.skip_ws()
        m = _NUM_RE.match(self.text, self.pos)
        if m is None:
            return None
        self.pos = m.end()
        return float(m.group(0))

    def ident(self) -> Optional[str]:
        self.skip_ws()
        m = _IDENT_RE.match(self.text, self.pos)
        if m is None:
            return None
        self.pos = m.end()
        return m.group(0)


def parse(text: str) -> Expr:
    """Parse the expression grammar.

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | atom ['^' exponent]
    atom   := number | 'z' | 'i' | ident | '(' expr ')'
    exponent := signed-number | '(' z-free arithmetic ')'

    Binary '-' desugars to Add(left, Neg(right)).  A unary minus applied
    directly to a numeric literal folds into the constant, so "-2" is
    Const(-2) while "-z^2" is Neg(Pow(z, 2)).
    """
    toks = _Tokens(text)
    node = _parse_expr(toks)
    toks.skip_ws()
    if toks.pos != len(toks.text):
        raise ParseError(f"unexpected trailing input {toks.text[toks.pos:]!r}", toks.pos)
    return node


def _parse_expr(toks: _Tokens) -> Expr:
    node = _parse_term(toks)
    while True:
        if toks.take("+"):
            node = Add(node, _parse_term(toks))
        elif toks.take("-"):
            node = Add(node, Neg(_parse_term(toks)))
        else:
            return node


def _parse_term(toks: _Tokens) -> Expr:
    node, _ = _parse_factor(toks)
    while True:
        if toks.take("*"):
            rhs, _ = _parse_factor(toks)
            node = Mul(node, rhs)
        elif toks.take("/"):
            rhs, _ = _parse_factor(toks)
            node = Div(node, rhs)
        else:
            return node


def _parse_factor(toks: _Tokens):
    # returns (node, is_bare_literal) so a unary minus can fold numbers
    if toks.take("-"):
        sub, lit = _parse_factor(toks)
        if lit:
            assert isinstance(sub, Const)
            return Const(-sub.value), False
        return Neg(sub), False
    node, lit = _parse_atom(toks)
    if toks.take("^"):
        node = Pow(node, _parse_exponent(toks))
        lit = False
    return node, lit


def _parse_atom(toks: _Tokens):
    ch = toks.peek()
    if ch == "":
        raise ParseError("unexpected end of input", toks.pos)
    if ch == "(":
        toks.take("(")
        node = _parse_expr(toks)
        toks.expect(")")
        return node, False
    num = toks.number()
    if num is not None:
        return Const(complex(num)), True
    start = toks.pos
    name = toks.ident()
    if name is None:
        raise ParseError(f"unexpected character {ch!r}", toks.pos)
    if name == "z":
        return Z(), False
    if name == "i":
        return Const(1j), False
    if name in PARAM_NAMES:
        return Param(name), False
    raise ParseError(f"unknown identifier {name!r}", start)


def _parse_exponent(toks: _Tokens) -> Expr:
    ch = toks.peek()
    if ch == "(":
        start = toks.pos
        toks.take("(")
        node = _parse_expr(toks)
        toks.expect(")")
        if _contains_z(node):
            raise ParseError("exponent must not contain z", start)
        return node
    neg = toks.take("-")
    if not neg:
        toks.take("+")
    num = toks.number()
    if num is None:
        raise ParseError("expected a number or parenthesized exponent after '^'",
                         toks.pos)
    return Const(complex(-num if neg else num))


# ---------------------------------------------------------------------------
# Printing

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _fmt_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def _fmt_const(c: complex) -> tuple[str, int]:
    re_, im_ = c.real, c.imag
    if im_ == 0.0:
        if re_ >= 0:
            return _fmt_real(re_), _PREC_ATOM
        return "-" + _fmt_real(-re_), _PREC_NEG
    if re_ == 0.0:
        if im_ == 1.0:
            return "i", _PREC_ATOM
        if im_ == -1.0:
            return "-i", _PREC_NEG
        return f"{_fmt_real(im_)}*i", _PREC_MUL
    sign = "+" if im_ >= 0 else "-"
    return f"({_fmt_real(re_)} {sign} {_fmt_real(abs(im_))}*i)", _PREC_ATOM


def _to_string(e: Expr) -> tuple[str, int]:
    if isinstance(e, Const):
        return _fmt_const(e.value)
    if isinstance(e, Z):
        return "z", _PREC_ATOM
    if isinstance(e, Param):
        return e.name, _PREC_ATOM
    if isinstance(e, Add):
        ls, lp = _to_string(e.left)
        if lp < _PREC_ADD:
            ls = f"({ls})"
        rhs = e.right
        op = "+"
        if isinstance(rhs, Neg):
            op, rhs = "-", rhs.operand
        rs, rp = _to_string(rhs)
        # the subtrahend/addend re-parses at term level
        if rp < _PREC_MUL:
            rs = f"({rs})"
        return f"{ls} {op} {rs}", _PREC_ADD
    if isinstance(e, Neg):
        s, p = _to_string(e.operand)
        # parenthesize so "-2" stays a negated node vs literal fold, and
        # nested structure survives re-parsing
        if p < _PREC_POW or isinstance(e.operand, (Const, Neg)):
            s = f"({s})"
        return f"-{s}", _PREC_NEG
    if isinstance(e, (Mul, Div)):
        op = "*" if isinstance(e, Mul) else "/"
        l, r = (e.left, e.right) if isinstance(e, Mul) else (e.num, e.den)
        ls, lp = _to_string(l)
        if lp < _PREC_MUL:
            ls = f"({ls})"
        rs, rp = _to_string(r)
        if rp <= _PREC_MUL:  # right operand must bind tighter than * and /
            rs = f"({rs})"
        return f"{ls}{op}{rs}", _PREC_MUL
    if isinstance(e, Pow):
        bs, bp = _to_string(e.base)
        if bp < _PREC_ATOM:
            bs = f"({bs})"
        exp = e.exponent
        if isinstance(exp, Const) and exp.value.imag == 0.0:
            return f"{bs}^{_fmt_real(exp.value.real)}", _PREC_POW
        es, _ = _to_string(exp)
        return f"{bs}^({es})", _PREC_POW
    raise TypeError(f"not an Expr node: {e!r}")


def to_string(e: Expr) -> str:
    """Render an expression so that parse(to_string(e)) reproduces it."""
    return _to_string(e)[0]


# ---------------------------------------------------------------------------
# Evaluation


def _is_int(s: float) -> Optional[int]:
    n = round(s)
    if abs(s - n) <= 1e-9 * max(1.0, abs(s)):
        return int(n)
    return None


def exponent_value(e: Expr, env: Optional[ParamEnv] = None) -> float:
    """Resolve a z-free exponent expression to a real number."""
    env = env or {}

    def rec(node: Expr) -> complex:
        if isinstance(node, Const):
            return node.value
        if isinstance(node, Param):
            try:
                return complex(env[node.name])
            except KeyError:
                raise EvalDomainError(f"unbound parameter {node.name!r}") from None
        if isinstance(node, Z):
            raise EvalDomainError("exponent must not contain z")
        if isinstance(node, Neg):
            return -rec(node.operand)
        if isinstance(node, Add):
            return rec(node.left) + rec(node.right)
        if isinstance(node, Mul):
            return rec(node.left) * rec(node.right)
        if isinstance(node, Div):
            d = rec(node.den)
            if d == 0:
                raise EvalDomainError("division by zero in exponent")
            return rec(node.num) / d
        if isinstance(node, Pow):
            b, s = rec(node.base), rec(node.exponent)
            return complex(b) ** complex(s)
        raise TypeError(f"not an Expr node: {node!r}")

    val = rec(e)
    if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)):
        raise EvalDomainError(f"exponent must be real, got {val!r}")
    if not math.isfinite(val.real):
        raise EvalDomainError(f"exponent is not finite: {val!r}")
    return float(val.real)


def _principal_pow(w: np.ndarray, s: float) -> np.ndarray:
    """Principal-branch power w^s; integer s bypasses the branch cut."""
    n = _is_int(s)
    if n is not None:
        if n < 0 and np.any(w == 0):
            raise EvalDomainError(f"zero base raised to negative power {n}")
        return w ** n
    bad = (w.imag == 0.0) & (w.real <= 0.0)
    if np.any(bad):
        zb = w[bad].flat[0]
        raise EvalDomainError(
            f"principal branch violation: base {zb} on (-inf, 0] with "
            f"non-integer exponent {s}")
    return np.exp(s * np.log(w))


def evaluate(e: Expr, z, env: Optional[ParamEnv] = None):
    """Evaluate e at z (complex scalar or ndarray) with principal powers.

    Raises EvalDomainError on division by zero, on a non-integer power of a
    base lying on the closed negative real axis, and on unbound parameters.
    """
    scalar = np.isscalar(z) or (isinstance(z, np.ndarray) and z.ndim == 0)
    zz = np.asarray(z, dtype=complex)
    out = BoundaryEvaluator(e, env).value(zz)
    if scalar:
        return complex(out)
    return out


# ---------------------------------------------------------------------------
# Substitutions


def _neg(e: Expr) -> Expr:
    if isinstance(e, Neg):
        return e.operand
    return Neg(e)


def _substitute_z(e: Expr, repl: Expr) -> Expr:
    if isinstance(e, Z):
        return repl
    if isinstance(e, (Const, Param)):
        return e
    if isinstance(e, Neg):
        return _neg(_substitute_z(e.operand, repl))
    if isinstance(e, Add):
        return Add(_substitute_z(e.left, repl), _substitute_z(e.right, repl))
    if isinstance(e, Mul):
        return Mul(_substitute_z(e.left, repl), _substitute_z(e.right, repl))
    if isinstance(e, Div):
        return Div(_substitute_z(e.num, repl), _substitute_z(e.den, repl))
    if isinstance(e, Pow):
        return Pow(_substitute_z(e.base, repl), e.exponent)
    raise TypeError(f"not an Expr node: {e!r}")


def substitute_negate(e: Expr) -> Expr:
    """z -> -z, collapsing double negations (so 1-z becomes 1+z)."""
    return _substitute_z(e, Neg(Z()))


def substitute_square(e: Expr) -> Expr:
    """z -> z^2 (so 1/(1-z) becomes 1/(1-z^2))."""
    return _substitute_z(e, Pow(Z(), Const(complex(2))))


def substitute_rotate(e: Expr, lam: complex) -> Expr:
    """z -> lam*z for a fixed complex constant lam."""
    return _substitute_z(e, Mul(Const(complex(lam)), Z()))


# ---------------------------------------------------------------------------
# Boundary structure: roots of factors on |z| = 1


@dataclass(frozen=True)
class SingularPoint:
    """A boundary point where a denominator/negative-power factor vanishes."""
    angle: float          # in [0, 2*pi)
    root: complex         # the exact factor root, normalized to |root| = 1
    blowup: float         # accumulated |negative exponent| of factors there


@dataclass(frozen=True)
class BoundaryStructure:
    singular: tuple[SingularPoint, ...]
    zeros: tuple[float, ...]     # boundary zeros of positive-power factors

    @property
    def max_blowup(self) -> float:
        return max((s.blowup for s in self.singular), default=0.0)


def _linear_parts(e: Expr, env: dict) -> Optional[tuple[complex, complex]]:
    """If e == a + b*z structurally, return (a, b); else None."""
    if isinstance(e, Const):
        return (e.value, 0j)
    if isinstance(e, Param):
        if e.name in env:
            return (complex(env[e.name]), 0j)
        return None
    if isinstance(e, Z):
        return (0j, 1 + 0j)
    if isinstance(e, Neg):
        r = _linear_parts(e.operand, env)
        return None if r is None else (-r[0], -r[1])
    if isinstance(e, Add):
        l = _linear_parts(e.left, env)
        r = _linear_parts(e.right, env)
        if l is None or r is None:
            return None
        return (l[0] + r[0], l[1] + r[1])
    if isinstance(e, Mul):
        l = _linear_parts(e.left, env)
        r = _linear_parts(e.right, env)
        if l is not None and l[1] == 0:
            return None if r is None else (l[0] * r[0], l[0] * r[1])
        if r is not None and r[1] == 0:
            return None if l is None else (r[0] * l[0], r[0] * l[1])
        return None
    if isinstance(e, Div):
        n = _linear_parts(e.num, env)
        d = _linear_parts(e.den, env)
        if n is None or d is None or d[1] != 0 or d[0] == 0:
            return None
        return (n[0] / d[0], n[1] / d[0])
    return None


def _linear_in_z2_parts(e: Expr, env: dict) -> Optional[tuple[complex, complex]]:
    """If e == a + b*z^2 structurally, return (a, b); else None."""
    if isinstance(e, (Const, Param)):
        return _linear_parts(e, env)
    if isinstance(e, Z):
        return None
    if isinstance(e, Neg):
        r = _linear_in_z2_parts(e.operand, env)
        return None if r is None else (-r[0], -r[1])
    if isinstance(e, Add):
        l = _linear_in_z2_parts(e.left, env)
        r = _linear_in_z2_parts(e.right, env)
        if l is None or r is None:
            return None
        return (l[0] + r[0], l[1] + r[1])
    if isinstance(e, Mul):
        if isinstance(e.left, Z) and isinstance(e.right, Z):
            return (0j, 1 + 0j)
        l = _linear_in_z2_parts(e.left, env)
        r = _linear_in_z2_parts(e.right, env)
        if l is not None and l[1] == 0:
            return None if r is None else (l[0] * r[0], l[0] * r[1])
        if r is not None and r[1] == 0:
            return None if l is None else (r[0] * l[0], r[0] * l[1])
        return None
    if isinstance(e, Div):
        n = _linear_in_z2_parts(e.num, env)
        d = _linear_in_z2_parts(e.den, env)
        if n is None or d is None or d[1] != 0 or d[0] == 0:
            return None
        return (n[0] / d[0], n[1] / d[0])
    if isinstance(e, Pow):
        if isinstance(e.base, Z):
            try:
                s = exponent_value(e.exponent, env)
            except EvalDomainError:
                return None
            if _is_int(s) == 2:
                return (0j, 1 + 0j)
        return None
    return None


def _canonical_angle(t: float) -> float:
    t = math.fmod(t, _TWO_PI)
    if t < 0:
        t += _TWO_PI
    if abs(t - _TWO_PI) < 1e-15:
        t = 0.0
    return t


def _circle_roots(a: complex, b: complex, squared: bool) -> list[complex]:
    """Unit-circle roots of a + b*z (or a + b*z^2 when squared)."""
    if b == 0:
        return []
    w = -a / b
    roots: list[complex] = []
    if squared:
        if abs(abs(w) - 1.0) > 1e-9:
            return []
        half = math.atan2(w.imag, w.real) / 2.0
        for ang in (half, half + math.pi):
            roots.append(complex(math.cos(ang), math.sin(ang)))
    else:
        if abs(abs(w) - 1.0) > 1e-9:
            return []
        roots.append(w / abs(w))
    return roots


def _exact_root(r: complex) -> complex:
    """Snap to the exactly representable unimodular points +-1, +-i."""
    for cand in (1 + 0j, -1 + 0j, 1j, -1j):
        if abs(r - cand) < 1e-12:
            return cand
    return r


def boundary_structure(e: Expr, env: Optional[ParamEnv] = None) -> BoundaryStructure:
    """Boundary roots of the multiplicative factors of e.

    Factors reached through denominators or negative resolved exponents
    contribute singular points; positive-power factors contribute plain
    zeros (kinks of |e|^p on the circle).  Sums that are not affine in z or
    z^2 are recursed into as sums, except inside a denominator, where their
    zeros cannot be located structurally (UnsupportedFormError).
    """
    env = check_param_env(env)
    singular: dict[float, tuple[complex, float]] = {}
    zeros: list[float] = []

    def add_singular(root: complex, strength: float) -> None:
        root = _exact_root(root)
        ang = _canonical_angle(math.atan2(root.imag, root.real))
        for known in singular:
            if abs(known - ang) < 1e-12 or abs(abs(known - ang) - _TWO_PI) < 1e-12:
                r0, s0 = singular[known]
                singular[known] = (r0, s0 + strength)
                return
        singular[ang] = (root, strength)

    def add_zero(root: complex) -> None:
        ang = _canonical_angle(math.atan2(root.imag, root.real))
        zeros.append(ang)

    def walk(node: Expr, mult: Optional[float]) -> None:
        # mult: accumulated exponent of the enclosing factor context
        # (None = sign unknown, treated as potentially singular)
        if isinstance(node, (Const, Param)):
            return
        if isinstance(node, Z):
            return  # root at the origin, never on the circle
        if isinstance(node, Neg):
            walk(node.operand, mult)
            return
        if isinstance(node, Mul):
            walk(node.left, mult)
            walk(node.right, mult)
            return
        if isinstance(node, Div):
            walk(node.num, mult)
            walk(node.den, None if mult is None else -mult)
            return
        if isinstance(node, Pow):
            try:
                s = exponent_value(node.exponent, env)
            except EvalDomainError:
                s = None
            if s is None or mult is None:
                walk(node.base, None)
            else:
                walk(node.base, mult * s)
            return
        if isinstance(node, Add):
            lin = _linear_parts(node, env)
            if lin is not None:
                roots = _circle_roots(lin[0], lin[1], squared=False)
            else:
                lin2 = _linear_in_z2_parts(node, env)
                if lin2 is not None:
                    roots = _circle_roots(lin2[0], lin2[1], squared=True)
                elif mult is not None and mult > 0:
                    # a sum of terms with nonnegative context: singular
                    # points are contained in the union over the summands
                    walk(node.left, mult)
                    walk(node.right, mult)
                    return
                else:
                    raise UnsupportedFormError(
                        "cannot locate boundary zeros of a non-affine "
                        "denominator factor structurally; pass singular "
                        "angles explicitly")
            for r in roots:
                if mult is None:
                    add_singular(r, 1.0)
                elif mult < 0:
                    add_singular(r, -mult)
                else:
                    add_zero(r)
            return
        raise TypeError(f"not an Expr node: {node!r}")

    walk(e, 1.0)
    pts = tuple(SingularPoint(ang, root, s)
                for ang, (root, s) in sorted(singular.items()))
    # drop zeros that coincide with singular angles
    sing_angles = [p.angle for p in pts]
    uniq_zeros: list[float] = []
    for t in sorted(set(zeros)):
        if any(abs(t - a) < 1e-12 for a in sing_angles):
            continue
        if any(abs(t - u) < 1e-12 for u in uniq_zeros):
            continue
        uniq_zeros.append(t)
    return BoundaryStructure(pts, tuple(uniq_zeros))


def boundary_singularities(e: Expr, env: Optional[ParamEnv] = None) -> set[float]:
    """Angles theta where a denominator or negative-power factor vanishes
    at e^{i theta}."""
    return {p.angle for p in boundary_structure(e, env).singular}


# ---------------------------------------------------------------------------
# Taylor coefficients


@dataclass(frozen=True)
class TaylorCoeffs:
    """Coefficients (a_0, ..., a_n) with a_n != 0 unless the zero polynomial."""
    coeffs: tuple[complex, ...]

    def __post_init__(self):
        if len(self.coeffs) == 0:
            object.__setattr__(self, "coeffs", (0j,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __iter__(self) -> Iterator[complex]:
        return iter(self.coeffs)


_MAX_POLY_DEGREE = 4096


def _poly_trim(c: list[complex]) -> list[complex]:
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def _poly_mul(a: list[complex], b: list[complex]) -> list[complex]:
    if len(a) + len(b) - 1 > _MAX_POLY_DEGREE + 1:
        raise NotPolynomialError("polynomial degree exceeds supported bound")
    out = [0j] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def to_polynomial(e: Expr, env: Optional[ParamEnv] = None) -> TaylorCoeffs:
    """Taylor coefficients of e when it is a polynomial in z.

    Exponents are resolved through env; a resolved exponent within 1e-9 of a
    nonnegative integer is treated as exact (so (1+z)^(4/p) at p = 0.5 is the
    degree-8 binomial).  Division is supported only by constants.
    """
    env = check_param_env(env)

    def rec(node: Expr) -> list[complex]:
        if isinstance(node, Const):
            return [node.value]
        if isinstance(node, Param):
            try:
                return [complex(env[node.name])]
            except KeyError:
                raise EvalDomainError(f"unbound parameter {node.name!r}") from None
        if isinstance(node, Z):
            return [0j, 1 + 0j]
        if isinstance(node, Neg):
            return [-c for c in rec(node.operand)]
        if isinstance(node, Add):
            l, r = rec(node.left), rec(node.right)
            if len(l) < len(r):
                l, r = r, l
            out = list(l)
            for k, c in enumerate(r):
                out[k] += c
            return _poly_trim(out)
        if isinstance(node, Mul):
            return _poly_trim(_poly_mul(rec(node.left), rec(node.right)))
        if isinstance(node, Div):
            den = _poly_trim(rec(node.den))
            if len(den) > 1:
                raise NotPolynomialError(
                    "division by a non-constant polynomial")
            if den[0] == 0:
                raise EvalDomainError("division by zero")
            return [c / den[0] for c in rec(node.num)]
        if isinstance(node, Pow):
            s = exponent_value(node.exponent, env)
            n = _is_int(s)
            if n is None or n < 0:
                raise NotPolynomialError(
                    f"exponent {s} is not a nonnegative integer")
            base = _poly_trim(rec(node.base))
            if (len(base) - 1) * n > _MAX_POLY_DEGREE:
                raise NotPolynomialError("polynomial degree exceeds supported bound")
            out = [1 + 0j]
            acc = base
            k = n
            while k:
                if k & 1:
                    out = _poly_mul(out, acc)
                k >>= 1
                if k:
                    acc = _poly_mul(acc, acc)
            return _poly_trim(out)
        raise TypeError(f"not an Expr node: {node!r}")

    return TaylorCoeffs(tuple(_poly_trim(rec(e))))


# ---------------------------------------------------------------------------
# Cached evaluation, including cancellation-safe boundary offsets


class BoundaryEvaluator:
    """Evaluator for a fixed expression and parameter binding.

    value(z) evaluates anywhere.  near(anchor, delta, gap) evaluates at
    z = anchor*(1-gap)*e^{i*delta} without ever forming z - anchor by
    subtraction: affine subexpressions a + b*z (and a + b*z^2) are expanded
    around the anchor, with the anchored constant snapped to zero when it is
    below roundoff scale.  This keeps relative accuracy for offsets far
    below machine epsilon, which the singular quadrature transform needs.
    """

    def __init__(self, e: Expr, env: Optional[ParamEnv] = None):
        self.expr = e
        self.env = check_param_env(env)
        self._lin: dict[int, Optional[tuple[complex, complex]]] = {}
        self._lin2: dict[int, Optional[tuple[complex, complex]]] = {}
        self._expo: dict[int, float] = {}

    # -- plain path --------------------------------------------------------

    def value(self, z: np.ndarray) -> np.ndarray:
        env = self.env

        def rec(node: Expr) -> np.ndarray:
            if isinstance(node, Const):
                return np.asarray(node.value)
            if isinstance(node, Param):
                try:
                    return np.asarray(complex(env[node.name]))
                except KeyError:
                    raise EvalDomainError(
                        f"unbound parameter {node.name!r}") from None
            if isinstance(node, Z):
                return z
            if isinstance(node, Neg):
                return -rec(node.operand)
            if isinstance(node, Add):
                return rec(node.left) + rec(node.right)
            if isinstance(node, Mul):
                return rec(node.left) * rec(node.right)
            if isinstance(node, Div):
                den = rec(node.den)
                if np.any(den == 0):
                    raise EvalDomainError("division by zero")
                return rec(node.num) / den
            if isinstance(node, Pow):
                return _principal_pow(np.asarray(rec(node.base)),
                                      self._exponent(node))
            raise TypeError(f"not an Expr node: {node!r}")

        return np.asarray(rec(self.expr))

    # -- helpers -----------------------------------------------------------

    def _exponent(self, node: Pow) -> float:
        key = id(node)
        if key not in self._expo:
            self._expo[key] = exponent_value(node.exponent, self.env)
        return self._expo[key]

    def _linear(self, node: Expr) -> Optional[tuple[complex, complex]]:
        key = id(node)
        if key not in self._lin:
            self._lin[key] = _linear_parts(node, self.env)
        return self._lin[key]

    def _linear2(self, node: Expr) -> Optional[tuple[complex, complex]]:
        key = id(node)
        if key not in self._lin2:
            self._lin2[key] = _linear_in_z2_parts(node, self.env)
        return self._lin2[key]

    # -- anchored path -----------------------------------------------------

    def near(self, anchor: complex, delta, gap: float) -> np.ndarray:
        """Evaluate at z = anchor*(1-gap)*e^{i*delta}.

        delta may be a scalar or ndarray of angle offsets (radians, signed);
        gap is the radial distance 1-|z|/|anchor| >= 0.  Accurate for |delta|
        and gap down to ~1e-290.
        """
        delta = np.asarray(delta, dtype=float)
        half = np.sin(delta / 2.0)
        # e^{i d} - 1, no cancellation
        em1 = (-2.0) * half * half + 1j * np.sin(delta)
        # (1-gap) e^{i d} - 1 = (e^{id} - 1) - gap - gap (e^{id} - 1)
        rel = em1 - gap - gap * em1
        dz = anchor * rel
        zfull = anchor + dz
        a2 = anchor * anchor
        dz2 = dz * (2.0 * anchor + dz)

        def rec(node: Expr) -> np.ndarray:
            lin = self._linear(node)
            if lin is not None:
                a, b = lin
                if b == 0:
                    return np.asarray(a)
                base = a + b * anchor
                if abs(base) <= 64.0 * _EPS * (abs(a) + abs(b * anchor)):
                    base = 0j
                return base + b * dz
            lin2 = self._linear2(node)
            if lin2 is not None:
                a, b = lin2
                base = a + b * a2
                if abs(base) <= 64.0 * _EPS * (abs(a) + abs(b * a2)):
                    base = 0j
                return base + b * dz2
            if isinstance(node, Z):
                return zfull
            if isinstance(node, Neg):
                return -rec(node.operand)
            if isinstance(node, Add):
                return rec(node.left) + rec(node.right)
            if isinstance(node, Mul):
                return rec(node.left) * rec(node.right)
            if isinstance(node, Div):
                den = rec(node.den)
                if np.any(den == 0):
                    raise EvalDomainError("division by zero")
                return rec(node.num) / den
            if isinstance(node, Pow):
                return _principal_pow(np.asarray(rec(node.base)),
                                      self._exponent(node))
            if isinstance(node, Param):  # only reached when unbound
                raise EvalDomainError(f"unbound parameter {node.name!r}")
            raise TypeError(f"not an Expr node: {node!r}")

        return np.asarray(rec(self.expr))
