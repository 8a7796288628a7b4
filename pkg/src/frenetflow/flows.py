"""Coefficient expressions for kinematic curve flows.

A flow moves each curve point with velocity a*B + b*N + c*T, where (T, N, B)
is the local frame and the three coefficients are expressions over the local
geometry. Expressions are parsed from strings; see GRAMMAR_HELP for the
accepted language.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Hashable, Mapping, Optional, Union

import numpy as np

from . import geometry, spectral
from .errors import (AperiodicExpression, DivisionNearZero, FlowSyntaxError,
                     InvalidFlowExpression, NonGeometricFlow, UnboundConstant)

GRAMMAR_HELP = """\
Flow coefficient expressions:

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' number)?
    base   := number | ident | 'd_s' '(' expr ')' | func '(' expr ')'
            | '(' expr ')'

    variables:  k (curvature), tau (torsion), s (arclength), t (time)
    functions:  sin cos exp sqrt abs
    d_s(...):   arclength derivative, nesting depth at most 3
    constants:  any other identifier, bound through the constants table

Examples: "k", "k^2", "k + W*k*tau", "W*d_s(k)", "0.5*W*k^2".
Expressions that mention s must be periodic on the domain."""

VARIABLES = ("k", "tau", "s", "t")
FUNCTIONS = ("sin", "cos", "exp", "sqrt", "abs")
MAX_DERIV_DEPTH = 3
DIV_GUARD = 1e-12
COEFF_EPS = 1e-13


# --- syntax tree ------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "FlowExpr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "FlowExpr"
    right: "FlowExpr"

    @property
    def bare_k_denominator(self) -> bool:
        """True for divisions whose denominator is the bare variable k; such
        quotients can be regular at k = 0 when the numerator carries k."""
        return self.op == "/" and self.right == Var("k")


@dataclass(frozen=True)
class Pow:
    base: "FlowExpr"
    exponent: float


@dataclass(frozen=True)
class Call:
    func: str
    arg: "FlowExpr"


@dataclass(frozen=True)
class Deriv:
    arg: "FlowExpr"


FlowExpr = Union[Num, Var, Const, Neg, BinOp, Pow, Call, Deriv]


# --- parsing ----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FlowSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def _peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self) -> Optional[_Token]:
        tok = self._peek()
        if tok is not None:
            self.pos += 1
        return tok

    def _eof_offset(self) -> int:
        return len(self.text)

    def parse(self) -> FlowExpr:
        if not self.tokens:
            raise FlowSyntaxError("empty expression", 0)
        node = self.expr()
        tok = self._peek()
        if tok is not None:
            raise FlowSyntaxError(f"unexpected {tok.text!r}", tok.offset)
        return node

    def expr(self) -> FlowExpr:
        tok = self._peek()
        negate = False
        if tok is not None and tok.kind == "op" and tok.text in "+-":
            self._next()
            negate = tok.text == "-"
        node = self.term()
        if negate:
            node = Neg(node)
        while True:
            tok = self._peek()
            if tok is None or tok.kind != "op" or tok.text not in "+-":
                return node
            self._next()
            node = BinOp(tok.text, node, self.term())

    def term(self) -> FlowExpr:
        node = self.factor()
        while True:
            tok = self._peek()
            if tok is None or tok.kind != "op" or tok.text not in "*/":
                return node
            self._next()
            node = BinOp(tok.text, node, self.factor())

    def factor(self) -> FlowExpr:
        node = self.base()
        tok = self._peek()
        if tok is not None and tok.kind == "op" and tok.text == "^":
            self._next()
            sign = 1.0
            tok = self._peek()
            if tok is not None and tok.kind == "op" and tok.text in "+-":
                self._next()
                sign = -1.0 if tok.text == "-" else 1.0
            tok = self._next()
            if tok is None:
                raise FlowSyntaxError("expected an exponent", self._eof_offset())
            if tok.kind != "number":
                raise FlowSyntaxError("exponent must be a number", tok.offset)
            node = Pow(node, sign * float(tok.text))
        return node

    def base(self) -> FlowExpr:
        tok = self._next()
        if tok is None:
            raise FlowSyntaxError("expected a value", self._eof_offset())
        if tok.kind == "number":
            return Num(float(tok.text))
        if tok.kind == "ident":
            if tok.text == "d_s":
                return Deriv(self._parenthesized(tok))
            if tok.text in FUNCTIONS:
                return Call(tok.text, self._parenthesized(tok))
            if tok.text in VARIABLES:
                return Var(tok.text)
            return Const(tok.text)
        if tok.kind == "op" and tok.text == "(":
            node = self.expr()
            closing = self._next()
            if closing is None:
                raise FlowSyntaxError("missing ')'", self._eof_offset())
            if closing.text != ")":
                raise FlowSyntaxError(f"expected ')', got {closing.text!r}",
                                      closing.offset)
            return node
        raise FlowSyntaxError(f"unexpected {tok.text!r}", tok.offset)

    def _parenthesized(self, head: _Token) -> FlowExpr:
        tok = self._next()
        if tok is None:
            raise FlowSyntaxError(f"{head.text} needs parentheses",
                                  self._eof_offset())
        if tok.text != "(":
            raise FlowSyntaxError(f"expected '(' after {head.text}", tok.offset)
        node = self.expr()
        closing = self._next()
        if closing is None:
            raise FlowSyntaxError("missing ')'", self._eof_offset())
        if closing.text != ")":
            raise FlowSyntaxError(f"expected ')', got {closing.text!r}",
                                  closing.offset)
        return node


def parse_expression(text: str) -> FlowExpr:
    """Parse a single coefficient expression."""
    return _Parser(text).parse()


# --- tree utilities ---------------------------------------------------------

def to_string(node: FlowExpr) -> str:
    """Render an expression; reparsing the result reproduces the tree."""
    return _render(node, 0)


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _render(node: FlowExpr, parent_prec: int) -> str:
    if isinstance(node, Num):
        text = repr(node.value)
        if text.endswith(".0"):
            text = text[:-2]
        return f"({text})" if node.value < 0 else text
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({_render(node.arg, 0)})"
    if isinstance(node, Deriv):
        return f"d_s({_render(node.arg, 0)})"
    if isinstance(node, Pow):
        base = _render(node.base, 99)
        if not isinstance(node.base, (Num, Var, Const, Call, Deriv)):
            base = f"({_render(node.base, 0)})"
        exp = repr(float(node.exponent))
        if exp.endswith(".0"):
            exp = exp[:-2]
        return f"{base}^{exp}"
    if isinstance(node, Neg):
        inner = _render(node.arg, 2)
        text = f"-{inner}"
        return f"({text})" if parent_prec >= 1 else text
    if isinstance(node, BinOp):
        prec = _PREC[node.op]
        left = _render(node.left, prec - 1)
        right = _render(node.right, prec)
        text = f"{left} {node.op} {right}"
        return f"({text})" if parent_prec >= prec else text
    raise TypeError(f"not a flow expression: {node!r}")


def variables(node: FlowExpr) -> set:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, (Num, Const)):
        return set()
    if isinstance(node, (Neg, Call, Deriv)):
        return variables(node.arg)
    if isinstance(node, Pow):
        return variables(node.base)
    return variables(node.left) | variables(node.right)


def constants_used(node: FlowExpr) -> set:
    if isinstance(node, Const):
        return {node.name}
    if isinstance(node, (Num, Var)):
        return set()
    if isinstance(node, (Neg, Call, Deriv)):
        return constants_used(node.arg)
    if isinstance(node, Pow):
        return constants_used(node.base)
    return constants_used(node.left) | constants_used(node.right)


def deriv_depth(node: FlowExpr) -> int:
    if isinstance(node, Deriv):
        return 1 + deriv_depth(node.arg)
    if isinstance(node, (Num, Var, Const)):
        return 0
    if isinstance(node, (Neg, Call)):
        return deriv_depth(node.arg)
    if isinstance(node, Pow):
        return deriv_depth(node.base)
    return max(deriv_depth(node.left), deriv_depth(node.right))


def fold(node: FlowExpr, constants: Optional[Mapping[str, float]] = None) -> FlowExpr:
    """Constant-fold and apply exact algebraic simplifications (x+0, 0*x,
    x^1, ...). With a constants table, named constants become literals."""
    if isinstance(node, Num):
        return node
    if isinstance(node, Var):
        return node
    if isinstance(node, Const):
        if constants is not None and node.name in constants:
            return Num(float(constants[node.name]))
        return node
    if isinstance(node, Neg):
        arg = fold(node.arg, constants)
        if isinstance(arg, Num):
            return Num(-arg.value)
        if isinstance(arg, Neg):
            return arg.arg
        return Neg(arg)
    if isinstance(node, Call):
        arg = fold(node.arg, constants)
        if isinstance(arg, Num):
            fn = getattr(np, node.func)
            return Num(float(fn(arg.value)))
        return Call(node.func, arg)
    if isinstance(node, Deriv):
        arg = fold(node.arg, constants)
        if isinstance(arg, Num):
            return Num(0.0)
        return Deriv(arg)
    if isinstance(node, Pow):
        base = fold(node.base, constants)
        if node.exponent == 0:
            return Num(1.0)
        if node.exponent == 1:
            return base
        if isinstance(base, Num):
            return Num(float(base.value ** node.exponent))
        return Pow(base, node.exponent)
    left = fold(node.left, constants)
    right = fold(node.right, constants)
    lnum = left if isinstance(left, Num) else None
    rnum = right if isinstance(right, Num) else None
    op = node.op
    if lnum is not None and rnum is not None:
        if op == "+":
            return Num(lnum.value + rnum.value)
        if op == "-":
            return Num(lnum.value - rnum.value)
        if op == "*":
            return Num(lnum.value * rnum.value)
        if abs(rnum.value) > DIV_GUARD:
            return Num(lnum.value / rnum.value)
        return BinOp(op, left, right)
    if op == "+":
        if lnum is not None and lnum.value == 0:
            return right
        if rnum is not None and rnum.value == 0:
            return left
    elif op == "-":
        if rnum is not None and rnum.value == 0:
            return left
        if lnum is not None and lnum.value == 0:
            return fold(Neg(right), constants)
    elif op == "*":
        if (lnum is not None and lnum.value == 0) or \
           (rnum is not None and rnum.value == 0):
            return Num(0.0)
        if lnum is not None and lnum.value == 1:
            return right
        if rnum is not None and rnum.value == 1:
            return left
    elif op == "/":
        if lnum is not None and lnum.value == 0:
            return Num(0.0)
        if rnum is not None and rnum.value == 1:
            return left
    return BinOp(op, left, right)


def is_zero(node: FlowExpr, constants: Optional[Mapping[str, float]] = None) -> bool:
    return fold(node, constants) == Num(0.0)


# --- flow specification -----------------------------------------------------

@dataclass(frozen=True)
class FlowSpec:
    """The three frame coefficients of a kinematic flow.

    a multiplies the binormal, b the normal, c the tangent. `constants`
    binds every named constant the expressions use.
    """

    a: FlowExpr
    b: FlowExpr
    c: FlowExpr
    constants: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "constants",
                           {k: float(v) for k, v in self.constants.items()})
        for label, node in (("a", self.a), ("b", self.b), ("c", self.c)):
            missing = constants_used(node) - set(self.constants)
            if missing:
                raise UnboundConstant(
                    f"coefficient {label} uses unbound constant(s) "
                    f"{sorted(missing)}")
            depth = deriv_depth(node)
            if depth > MAX_DERIV_DEPTH:
                raise InvalidFlowExpression(
                    f"coefficient {label} nests d_s {depth} deep "
                    f"(limit {MAX_DERIV_DEPTH})")

    def coefficient_texts(self) -> dict:
        return {"a": to_string(self.a), "b": to_string(self.b),
                "c": to_string(self.c)}


def parse_flow(a: str, b: str = "0", c: str = "0",
               constants: Optional[Mapping[str, float]] = None) -> FlowSpec:
    """Parse the three coefficient strings into a validated FlowSpec."""
    return FlowSpec(parse_expression(a), parse_expression(b),
                    parse_expression(c), dict(constants or {}))


def fold_spec(spec: FlowSpec) -> FlowSpec:
    return FlowSpec(fold(spec.a, spec.constants), fold(spec.b, spec.constants),
                    fold(spec.c, spec.constants), spec.constants)


# --- evaluation -------------------------------------------------------------

@dataclass
class EvalContext:
    """Grid data an expression is evaluated against.

    arc_scale holds |dgamma/du| when the samples live on a grid parameter u
    that is not exactly arclength; d_s then divides by it. derivative_hints
    supplies exact first derivatives for k and tau when the caller knows them
    analytically (keyed by ("k", 1) / ("tau", 1)).
    """

    curvature: np.ndarray
    torsion: np.ndarray
    s: np.ndarray
    t: float
    length: float
    constants: Mapping[str, float]
    arc_scale: Optional[np.ndarray] = None
    derivative_hints: Optional[Mapping] = None


def _eval(node: FlowExpr, ctx: EvalContext):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        if node.name == "k":
            return ctx.curvature
        if node.name == "tau":
            return ctx.torsion
        if node.name == "s":
            return ctx.s
        return ctx.t
    if isinstance(node, Const):
        try:
            return ctx.constants[node.name]
        except KeyError:
            raise UnboundConstant(node.name) from None
    if isinstance(node, Neg):
        return -_eval(node.arg, ctx)
    if isinstance(node, Call):
        val = _eval(node.arg, ctx)
        if node.func == "sqrt" and np.min(val) < 0:
            raise InvalidFlowExpression("sqrt of a negative value")
        return getattr(np, node.func)(val)
    if isinstance(node, Deriv):
        if ctx.derivative_hints and isinstance(node.arg, Var):
            hint = ctx.derivative_hints.get((node.arg.name, 1))
            if hint is not None:
                return hint
        val = _eval(node.arg, ctx)
        if np.ndim(val) == 0:
            return 0.0
        out = spectral.derivative(val, ctx.length)
        if ctx.arc_scale is not None:
            out = out / ctx.arc_scale
        return out
    if isinstance(node, Pow):
        base = _eval(node.base, ctx)
        exp = node.exponent
        if exp == round(exp):
            exp = int(round(exp))
            if exp < 0 and np.min(np.abs(base)) < DIV_GUARD:
                _raise_near_zero(node.base, base)
            return base ** exp
        if np.min(base) < 0:
            raise InvalidFlowExpression(
                f"fractional power of a negative base in {to_string(node)}")
        return base ** exp
    left = _eval(node.left, ctx)
    right = _eval(node.right, ctx)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if np.min(np.abs(right)) < DIV_GUARD:
        _raise_near_zero(node.right, right)
    return left / right


def _raise_near_zero(node: FlowExpr, value) -> None:
    if np.ndim(value) == 0:
        raise DivisionNearZero(
            f"denominator {to_string(node)} = {float(value):.3g}")
    idx = int(np.argmin(np.abs(value)))
    raise DivisionNearZero(
        f"denominator {to_string(node)} is {value[idx]:.3g} at node {idx}")


def _check_periodic(node: FlowExpr, ctx: EvalContext, label: str) -> None:
    if "s" not in variables(node):
        return
    v1 = np.asarray(_eval(node, ctx), dtype=float)
    shifted = replace(ctx, s=ctx.s + ctx.length)
    v2 = np.asarray(_eval(node, shifted), dtype=float)
    scale = 1.0 + float(np.max(np.abs(v1)))
    if np.max(np.abs(v1 - v2)) > 1e-9 * scale:
        raise AperiodicExpression(
            f"coefficient {label} = {to_string(node)} is not periodic on "
            f"length {ctx.length:g}")


def evaluate_in_context(spec: FlowSpec, ctx: EvalContext):
    """Sample (a, b, c) on the context grid. Returns three (n,) arrays."""
    n = ctx.curvature.size
    out = []
    for label, node in (("a", spec.a), ("b", spec.b), ("c", spec.c)):
        _check_periodic(node, ctx, label)
        val = _eval(node, ctx)
        arr = np.asarray(val, dtype=float)
        if arr.ndim == 0:
            arr = np.full(n, float(arr))
        out.append(arr)
    return tuple(out)


def evaluate_flow(spec: FlowSpec, profile: geometry.GeometryProfile,
                  time: float = 0.0):
    """Sample the flow coefficients on a profile's grid at the given time."""
    ctx = EvalContext(curvature=profile.curvature, torsion=profile.torsion,
                      s=profile.grid, t=float(time), length=profile.length,
                      constants=spec.constants)
    return evaluate_in_context(spec, ctx)


# --- structural analysis ----------------------------------------------------

def _merge_monomials(target: dict, key, coeff: float) -> None:
    target[key] = target.get(key, 0.0) + coeff


def _mul_monomials(lhs: dict, rhs: dict) -> Optional[dict]:
    if len(lhs) * len(rhs) > 128:
        return None
    out: dict = {}
    for k1, c1 in lhs.items():
        p1 = dict(k1)
        for k2, c2 in rhs.items():
            powers = dict(p1)
            for atom, e in k2:
                powers[atom] = powers.get(atom, 0.0) + e
            key = tuple(sorted(((a, e) for a, e in powers.items() if e != 0),
                               key=str))
            _merge_monomials(out, key, c1 * c2)
    return out


def _expand(node: FlowExpr, constants: Mapping[str, float]) -> dict:
    """Expansion into a sum of monomials over atoms; sub-trees that resist
    expansion (function calls, d_s, general quotients) become opaque atoms."""
    opaque = {((node, 1.0),): 1.0}
    if isinstance(node, Num):
        return {(): node.value}
    if isinstance(node, Const):
        if node.name in constants:
            return {(): float(constants[node.name])}
        return opaque
    if isinstance(node, Var):
        return {((node.name, 1.0),): 1.0}
    if isinstance(node, Neg):
        return {k: -c for k, c in _expand(node.arg, constants).items()}
    if isinstance(node, BinOp):
        if node.op in "+-":
            out = dict(_expand(node.left, constants))
            sign = 1.0 if node.op == "+" else -1.0
            for k, c in _expand(node.right, constants).items():
                _merge_monomials(out, k, sign * c)
            return out
        if node.op == "*":
            prod = _mul_monomials(_expand(node.left, constants),
                                  _expand(node.right, constants))
            return prod if prod is not None else opaque
        den = _expand(node.right, constants)
        if len(den) == 1:
            (key, coeff), = den.items()
            if coeff != 0:
                inv = {tuple((a, -e) for a, e in key): 1.0 / coeff}
                prod = _mul_monomials(_expand(node.left, constants), inv)
                return prod if prod is not None else opaque
        return opaque
    if isinstance(node, Pow):
        base = _expand(node.base, constants)
        exp = node.exponent
        if len(base) == 1:
            (key, coeff), = base.items()
            if coeff > 0 or exp == round(exp):
                return {tuple((a, e * exp) for a, e in key):
                        float(coeff ** exp)}
        if exp == round(exp) and 0 <= exp <= 8:
            out = {(): 1.0}
            for _ in range(int(round(exp))):
                nxt = _mul_monomials(out, base)
                if nxt is None:
                    return opaque
                out = nxt
            return out
        return opaque
    return opaque


def power_series(node: FlowExpr,
                 constants: Optional[Mapping[str, float]] = None
                 ) -> Optional[tuple]:
    """Detect a polynomial in k with zero constant term.

    Returns ((n, a_n), ...) sorted by degree, or None when the expression is
    not such a polynomial. Coefficients below 1e-13 are dropped.
    """
    mono = _expand(fold(node, constants), constants)
    series = {}
    for key, coeff in mono.items():
        if abs(coeff) <= COEFF_EPS:
            continue
        if len(key) != 1:
            return None
        atom, exp = key[0]
        if atom != "k" or abs(exp - round(exp)) > 1e-9 or round(exp) < 1:
            return None
        deg = int(round(exp))
        series[deg] = series.get(deg, 0.0) + coeff
    return tuple(sorted((d, c) for d, c in series.items()
                        if abs(c) > COEFF_EPS))


@dataclass(frozen=True)
class FlowStructure:
    """Shape of the binormal coefficient, as the wave-side solvers need it.

    Either `series` lists the (degree, coefficient) pairs of a polynomial in
    k — plus an optional k*tau term with coefficient `ktau` — or `pure_k`
    marks an arbitrary function of k alone, handled by quadrature.
    """

    series: Optional[tuple]
    ktau: float
    pure_k: bool


def analyze_binormal(spec: FlowSpec) -> FlowStructure:
    """Classify the binormal coefficient for the wave-side route.

    Raises NonGeometricFlow when it depends on anything beyond k (and a
    single k*tau term), since the curvature-potential antiderivative is only
    defined for those shapes.
    """
    mono = _expand(fold(spec.a, spec.constants), spec.constants)
    series: dict = {}
    ktau = 0.0
    structured = True
    for key, coeff in mono.items():
        if abs(coeff) <= COEFF_EPS:
            continue
        if len(key) == 1:
            atom, exp = key[0]
            if atom == "k" and abs(exp - round(exp)) < 1e-9 and round(exp) >= 1:
                deg = int(round(exp))
                series[deg] = series.get(deg, 0.0) + coeff
                continue
        if len(key) == 2:
            powers = dict(key)
            if set(powers) == {"k", "tau"} and powers["k"] == 1.0 \
                    and powers["tau"] == 1.0:
                ktau += coeff
                continue
        structured = False
        break
    if structured:
        clean = tuple(sorted((d, c) for d, c in series.items()
                             if abs(c) > COEFF_EPS))
        if abs(ktau) <= COEFF_EPS:
            ktau = 0.0
        return FlowStructure(clean, ktau, False)
    if variables(spec.a) <= {"k"} and deriv_depth(spec.a) == 0:
        return FlowStructure(None, 0.0, True)
    raise NonGeometricFlow(
        f"binormal coefficient {to_string(spec.a)} is not a function of "
        "curvature (plus an optional k*tau term); the wave-side route "
        "cannot form its potential")


# --- classification ---------------------------------------------------------

@dataclass(frozen=True)
class FlowClassification:
    """Summary facts the run planner needs about a flow."""

    is_binormal: bool
    length_condition_residual: float
    is_power_series_binormal: Optional[tuple]


def default_probes(n: int = 256, length: float = 2 * np.pi,
                   seed: int = 2024) -> list:
    """Probe profiles for residual estimation: constant, single-mode, and two
    random band-limited profiles."""
    s = spectral.grid(n, length)
    w = 2 * np.pi / length
    rng = np.random.default_rng(seed)
    probes = [
        geometry.GeometryProfile(np.full(n, 1.1), np.full(n, 0.25), length),
        geometry.GeometryProfile(1.0 + 0.3 * np.cos(w * s),
                                 0.2 * np.sin(w * s), length),
        geometry.random_profile(n, length, rng),
        geometry.random_profile(n, length, rng),
    ]
    return probes


def classify_flow(spec: FlowSpec, probes=None) -> FlowClassification:
    """Classify a flow: binormality (b and c fold to zero), the worst
    length-condition residual max|d_s(c) - b*k| over the probe profiles, and
    the power-series form of the binormal coefficient when there is one."""
    binormal = is_zero(spec.b, spec.constants) and is_zero(spec.c, spec.constants)
    residual = 0.0
    for profile in (probes if probes is not None else default_probes()):
        _, b, c = evaluate_flow(spec, profile)
        cs = spectral.derivative(c, profile.length)
        residual = max(residual,
                       float(np.max(np.abs(cs - b * profile.curvature))))
    series = power_series(spec.a, spec.constants) if binormal else None
    return FlowClassification(binormal, residual, series)
