"""Expression mini-language for holomorphic symbols.

Grammar (highest precedence first)::

    atom    := NUMBER | IDENT | IDENT '(' args ')' | '(' expr ')' | '[' args ']'
    power   := atom ('^' unary)?           # right-associative, integer exponent
    unary   := '-' unary | '+' unary | power
    term    := unary (('*' | '/') unary)*
    expr    := term (('+' | '-') term)*

Identifiers: the variable (``z`` by default, ``s`` for half-plane maps),
``i``, ``pi`` and the primitives ``blaschke(a)``, ``blaschke(a, f)``,
``moebius_cayley`` (bare or applied), ``series([c0, ..., cn])``,
``series([...], f)``, ``exp(f)`` and ``compose(outer, inner)``.
There is no implicit multiplication; a complex literal is written ``a+b*i``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

__all__ = [
    "AnalyticExpr",
    "Const",
    "Var",
    "Neg",
    "BinOp",
    "Pow",
    "Compose",
    "Blaschke",
    "Cayley",
    "Series",
    "Exp",
    "ParseError",
    "SelfMapReport",
    "parse_expr",
    "validate_self_map",
    "check_denominators",
    "compose",
    "TOL_SELFMAP",
]

TOL_SELFMAP = 1e-9


class ParseError(ValueError):
    """Raised for malformed symbol source.

    ``kind`` is one of ``syntax``, ``unknown-identifier``, ``arity`` or
    ``parameter-out-of-range``; ``position`` indexes into the source.
    """

    KINDS = ("syntax", "unknown-identifier", "arity", "parameter-out-of-range")

    def __init__(self, message, position, kind="syntax", source=""):
        if kind not in self.KINDS:
            raise ValueError(f"unknown ParseError kind {kind!r}")
        if source:
            position = min(max(position, 0), max(len(source) - 1, 0))
        self.message = message
        self.position = position
        self.kind = kind
        self.source = source
        super().__init__(f"{kind} error at {position}: {message}")


class EvaluationError(ArithmeticError):
    """A symbol could not be evaluated (pole or overflow) at some point."""


# ---------------------------------------------------------------- nodes


class AnalyticExpr:
    """Base class of the expression tree. Nodes are immutable."""

    precedence = 100

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return self._eval(z)

    def _eval(self, z):
        raise NotImplementedError

    def to_source(self, var="z") -> str:
        raise NotImplementedError

    def __str__(self):
        return self.to_source()

    def degree(self) -> Optional[int]:
        """Polynomial degree, or None when the node is not a polynomial."""
        return None

    def is_constant(self) -> bool:
        return False

    def substitute(self, inner: "AnalyticExpr") -> "AnalyticExpr":
        """Return the tree of ``self(inner(z))``."""
        raise NotImplementedError

    def _wrap(self, child: "AnalyticExpr", var: str, min_prec: int) -> str:
        text = child.to_source(var)
        return f"({text})" if child.precedence < min_prec else text


def _fmt_complex(c: complex) -> str:
    c = complex(c)
    re_, im = c.real, c.imag
    if im == 0:
        return repr(float(re_))
    if re_ == 0:
        return f"{float(im)!r}*i"
    sign = "+" if im >= 0 or math.isnan(im) else "-"
    return f"{float(re_)!r}{sign}{abs(float(im))!r}*i"


@dataclass(frozen=True)
class Const(AnalyticExpr):
    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))

    @property
    def precedence(self):
        c = self.value
        if c.imag != 0 and c.real != 0:
            return 10  # prints as a sum
        if c.real < 0 or c.imag < 0:
            return 30  # leading minus
        return 100

    def _eval(self, z):
        return np.full(z.shape, self.value, dtype=complex)

    def to_source(self, var="z"):
        return _fmt_complex(self.value)

    def degree(self):
        return 0

    def is_constant(self):
        return True

    def substitute(self, inner):
        return self


@dataclass(frozen=True)
class Var(AnalyticExpr):
    def _eval(self, z):
        return z

    def to_source(self, var="z"):
        return var

    def degree(self):
        return 1

    def substitute(self, inner):
        return inner


@dataclass(frozen=True)
class Neg(AnalyticExpr):
    operand: AnalyticExpr
    precedence = 30

    def _eval(self, z):
        return -self.operand._eval(z)

    def to_source(self, var="z"):
        return "-" + self._wrap(self.operand, var, 40)

    def degree(self):
        return self.operand.degree()

    def is_constant(self):
        return self.operand.is_constant()

    def substitute(self, inner):
        return Neg(self.operand.substitute(inner))


_PREC = {"+": 10, "-": 10, "*": 20, "/": 20}


@dataclass(frozen=True)
class BinOp(AnalyticExpr):
    op: str
    left: AnalyticExpr
    right: AnalyticExpr
    # set by check_denominators(); never assumed at parse time
    denominator_checked: bool = field(default=False, compare=False)

    @property
    def precedence(self):
        return _PREC[self.op]

    def _eval(self, z):
        a = self.left._eval(z)
        b = self.right._eval(z)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        return a / b

    def to_source(self, var="z"):
        prec = _PREC[self.op]
        left = self._wrap(self.left, var, prec)
        # left-associative: right operand of - and / needs strictly higher precedence
        rmin = prec + 1 if self.op in "-/" else prec
        right = self._wrap(self.right, var, rmin)
        return f"{left}{self.op}{right}"

    def degree(self):
        dl, dr = self.left.degree(), self.right.degree()
        if dl is None or dr is None:
            return None
        if self.op in "+-":
            return max(dl, dr)
        if self.op == "*":
            return dl + dr
        return dl if dr == 0 else None

    def is_constant(self):
        return self.left.is_constant() and self.right.is_constant()

    def substitute(self, inner):
        return BinOp(self.op, self.left.substitute(inner), self.right.substitute(inner))


@dataclass(frozen=True)
class Pow(AnalyticExpr):
    base: AnalyticExpr
    exponent: int
    precedence = 40

    def _eval(self, z):
        b = self.base._eval(z)
        if self.exponent >= 0:
            return b ** self.exponent
        return 1.0 / b ** (-self.exponent)

    def to_source(self, var="z"):
        base = self._wrap(self.base, var, 41)
        exp = str(self.exponent) if self.exponent >= 0 else f"({self.exponent})"
        return f"{base}^{exp}"

    def degree(self):
        d = self.base.degree()
        if d is None or self.exponent < 0:
            return None if d != 0 else 0
        return d * self.exponent

    def is_constant(self):
        return self.base.is_constant()

    def substitute(self, inner):
        return Pow(self.base.substitute(inner), self.exponent)


@dataclass(frozen=True)
class Compose(AnalyticExpr):
    """``outer(inner(z))``."""

    outer: AnalyticExpr
    inner: AnalyticExpr

    def _eval(self, z):
        return self.outer._eval(self.inner._eval(z))

    def to_source(self, var="z"):
        return f"compose({self.outer.to_source(var)}, {self.inner.to_source(var)})"

    def degree(self):
        do, di = self.outer.degree(), self.inner.degree()
        if do is None or di is None:
            return None
        return do * di

    def is_constant(self):
        return self.outer.is_constant() or self.inner.is_constant()

    def substitute(self, inner):
        return Compose(self.outer, self.inner.substitute(inner))


@dataclass(frozen=True)
class Blaschke(AnalyticExpr):
    """Blaschke factor ``(a - z) / (1 - conj(a) z)`` with ``|a| < 1``."""

    a: complex

    def __post_init__(self):
        a = complex(self.a)
        if not abs(a) < 1:
            raise ValueError(f"Blaschke parameter must satisfy |a| < 1, got {a}")
        object.__setattr__(self, "a", a)

    def _eval(self, z):
        a = self.a
        return (a - z) / (1 - np.conj(a) * z)

    def to_source(self, var="z"):
        arg = "" if var == "z" else f", {var}"
        return f"blaschke({_fmt_complex(self.a)}{arg})"

    def substitute(self, inner):
        return Compose(self, inner)


@dataclass(frozen=True)
class Cayley(AnalyticExpr):
    """The self-inverse Moebius map ``(1 - z) / (1 + z)``."""

    def _eval(self, z):
        return (1 - z) / (1 + z)

    def to_source(self, var="z"):
        return "moebius_cayley" if var == "z" else f"moebius_cayley({var})"

    def substitute(self, inner):
        return Compose(self, inner)


@dataclass(frozen=True)
class Series(AnalyticExpr):
    """Truncated power series ``sum c_k z^k``."""

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs)
        if not coeffs:
            raise ValueError("series needs at least one coefficient")
        object.__setattr__(self, "coeffs", coeffs)

    def _eval(self, z):
        # Horner, highest coefficient first
        out = np.zeros(z.shape, dtype=complex)
        for c in reversed(self.coeffs):
            out = out * z + c
        return out

    def to_source(self, var="z"):
        body = ", ".join(_fmt_complex(c) for c in self.coeffs)
        arg = "" if var == "z" else f", {var}"
        return f"series([{body}]{arg})"

    def degree(self):
        nz = [k for k, c in enumerate(self.coeffs) if c != 0]
        return nz[-1] if nz else 0

    def substitute(self, inner):
        return Compose(self, inner)


@dataclass(frozen=True)
class Exp(AnalyticExpr):
    operand: AnalyticExpr

    def _eval(self, z):
        return np.exp(self.operand._eval(z))

    def to_source(self, var="z"):
        return f"exp({self.operand.to_source(var)})"

    def is_constant(self):
        return self.operand.is_constant()

    def degree(self):
        return 0 if self.is_constant() else None

    def substitute(self, inner):
        return Exp(self.operand.substitute(inner))


def compose(outer: AnalyticExpr, inner: AnalyticExpr) -> AnalyticExpr:
    """Tree for ``outer(inner(z))``, substituting through arithmetic nodes."""
    return outer.substitute(inner)


def _binop(op, left, right):
    if isinstance(left, Const) and isinstance(right, Const):
        folded = BinOp(op, left, right)(0.0)
        if np.isfinite(folded):
            return Const(complex(folded))
    return BinOp(op, left, right)


# ---------------------------------------------------------------- lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),\[\]])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(src: str):
    pos = 0
    toks = []
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", pos, "syntax", src)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(src)))
    return toks


# ---------------------------------------------------------------- parser


class _Parser:
    def __init__(self, src: str, variable: str):
        self.src = src
        self.var = variable
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, msg, tok=None, kind="syntax"):
        tok = tok or self.tok
        return ParseError(msg, tok.pos, kind, self.src)

    def accept(self, text):
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")

    def parse(self):
        node = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected token {self.tok.text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = _binop(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = _binop(op, node, self.unary())
        return node

    def unary(self):
        if self.accept("-"):
            operand = self.unary()
            if isinstance(operand, Const):
                return Const(-operand.value)
            return Neg(operand)
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            caret = self.tok
            self.i += 1
            exp_node = self.unary()
            if not exp_node.is_constant():
                raise self.error("exponent must be a constant integer", caret)
            value = complex(exp_node(0.0))
            if value.imag != 0 or value.real != round(value.real):
                raise self.error(f"exponent must be an integer, got {value}", caret)
            return Pow(base, int(round(value.real)))
        return base

    def args(self, closer):
        out = []
        if self.accept(closer):
            return out
        while True:
            out.append(self.expr())
            if self.accept(closer):
                return out
            self.expect(",")

    def constant_of(self, node, tok, what):
        if not node.is_constant():
            raise self.error(f"{what} must be a constant", tok)
        value = complex(node(0.0))
        if not np.isfinite(value):
            raise self.error(f"{what} is not finite", tok, "parameter-out-of-range")
        return value

    def atom(self):
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Const(float(tok.text))
        if tok.kind == "op" and tok.text == "(":
            self.i += 1
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "op" and tok.text == "[":
            raise self.error("list literal is only valid as a series() argument")
        if tok.kind == "ident":
            self.i += 1
            return self.identifier(tok)
        found = tok.text or "end of input"
        raise self.error(f"unexpected {found!r}")

    def identifier(self, tok):
        name = tok.text
        if name == self.var:
            return Var()
        if name == "i":
            return Const(1j)
        if name == "pi":
            return Const(math.pi)
        called = self.tok.kind == "op" and self.tok.text == "("
        if name == "moebius_cayley":
            if not called:
                return Cayley()
            self.i += 1
            args = self.args(")")
            if len(args) != 1:
                raise self.error("moebius_cayley takes one argument", tok, "arity")
            return compose(Cayley(), args[0])
        if name in ("blaschke", "exp", "compose", "series"):
            if not called:
                raise self.error(f"{name} must be called", tok, "arity")
            self.i += 1
            if name == "series":
                return self.series(tok)
            args = self.args(")")
            return self.call(tok, name, args)
        raise self.error(f"unknown identifier {name!r}", tok, "unknown-identifier")

    def series(self, tok):
        if not self.accept("["):
            raise self.error("series expects a coefficient list [c0, ..., cn]")
        items = self.args("]")
        if not items:
            raise self.error("series needs at least one coefficient", tok, "arity")
        coeffs = [self.constant_of(c, tok, "series coefficient") for c in items]
        node = Series(tuple(coeffs))
        if self.accept(","):
            arg = self.expr()
            self.expect(")")
            return compose(node, arg)
        self.expect(")")
        return node

    def call(self, tok, name, args):
        if name == "exp":
            if len(args) != 1:
                raise self.error("exp takes one argument", tok, "arity")
            return Exp(args[0])
        if name == "compose":
            if len(args) != 2:
                raise self.error("compose takes two arguments", tok, "arity")
            return compose(args[0], args[1])
        # blaschke
        if len(args) not in (1, 2):
            raise self.error("blaschke takes one or two arguments", tok, "arity")
        a = self.constant_of(args[0], tok, "blaschke parameter")
        if not abs(a) < 1:
            raise self.error(
                f"blaschke parameter must satisfy |a| < 1, got |a| = {abs(a):.6g}",
                tok,
                "parameter-out-of-range",
            )
        node = Blaschke(a)
        return compose(node, args[1]) if len(args) == 2 else node


def parse_expr(src: str, variable: str = "z") -> AnalyticExpr:
    """Parse ``src`` into an evaluable tree.

    >>> parse_expr("(1+z)/2")(1.0)
    array(1.+0.j)
    """
    if not isinstance(src, str) or not src.strip():
        raise ParseError("empty expression", 0, "syntax", src or "")
    return _Parser(src, variable).parse()


# ---------------------------------------------------------------- validation


@dataclass(frozen=True)
class SelfMapReport:
    max_boundary_modulus: float
    max_interior_modulus: float
    passed: bool
    tol: float = TOL_SELFMAP
    message: str = ""

    @property
    def max_modulus(self):
        return max(self.max_boundary_modulus, self.max_interior_modulus)

    def to_dict(self):
        return {
            "max_boundary_modulus": self.max_boundary_modulus,
            "max_interior_modulus": self.max_interior_modulus,
            "pass": self.passed,
            "tol": self.tol,
            "message": self.message,
        }


def _interior_grid(n_samples):
    n_theta = max(16, int(np.sqrt(n_samples)))
    radii = np.linspace(0.0, 1.0, max(4, n_theta // 4), endpoint=False)[1:]
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    pts = (radii[:, None] * np.exp(1j * theta[None, :])).ravel()
    return np.concatenate([[0.0], pts])


def validate_self_map(psi: AnalyticExpr, n_samples: int = 4096, tol: float = TOL_SELFMAP):
    """Check ``sup |psi| <= 1 + tol`` on ``n_samples`` boundary points and an
    interior polar grid. A pole on the grid fails the check; it never raises.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    theta = 2 * np.pi * np.arange(n_samples) / n_samples
    bvals = np.abs(psi(np.exp(1j * theta)))
    ivals = np.abs(psi(_interior_grid(n_samples)))
    bad_b = ~np.isfinite(bvals)
    bad_i = ~np.isfinite(ivals)
    if bad_b.any() or bad_i.any():
        where = "boundary" if bad_b.any() else "interior"
        k = int(np.argmax(bad_b if bad_b.any() else bad_i))
        return SelfMapReport(
            float(np.nanmax(bvals)) if (~bad_b).any() else float("inf"),
            float(np.nanmax(ivals)) if (~bad_i).any() else float("inf"),
            False,
            tol,
            f"evaluation failed (pole) at {where} sample {k}",
        )
    mb, mi = float(bvals.max()), float(ivals.max())
    ok = max(mb, mi) <= 1 + tol
    msg = "" if ok else f"sup |psi| = {max(mb, mi):.12g} exceeds 1 + {tol:g}"
    return SelfMapReport(mb, mi, ok, tol, msg)


def check_denominators(expr: AnalyticExpr, n_samples: int = 4096) -> AnalyticExpr:
    """Return a copy of ``expr`` whose division nodes carry
    ``denominator_checked=True`` when the denominator has no zero on the
    sampled closed disk. Raises EvaluationError naming the offending node.
    """
    pts = np.concatenate(
        [np.exp(2j * np.pi * np.arange(n_samples) / n_samples), _interior_grid(n_samples)]
    )

    def walk(node):
        if isinstance(node, BinOp):
            left, right = walk(node.left), walk(node.right)
            if node.op == "/":
                den = np.abs(right(pts))
                if not np.all(np.isfinite(den)) or den.min() == 0:
                    raise EvaluationError(
                        f"denominator {right.to_source()!r} vanishes on the closed disk"
                    )
                return replace(node, left=left, right=right, denominator_checked=True)
            return replace(node, left=left, right=right)
        if isinstance(node, Neg):
            return Neg(walk(node.operand))
        if isinstance(node, Pow):
            return Pow(walk(node.base), node.exponent)
        if isinstance(node, Compose):
            return Compose(node.outer, walk(node.inner))
        if isinstance(node, Exp):
            return Exp(walk(node.operand))
        return node

    return walk(expr)
