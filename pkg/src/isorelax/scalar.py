"""Scalar profiles of the gap variable: callables, parsed expressions and
grid samplings.

Grammar accepted by :func:`parse_expr`::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | power
    power  := atom ("^" factor)?
    atom   := NUMBER | "t" | FUNC "(" expr ")" | "(" expr ")"
    FUNC   := "abs" | "sqrt" | "log" | "exp"

``^`` is right-associative and binds tighter than unary minus, so ``-t^2`` is
``-(t^2)`` and ``2^3^2`` is ``2^(3^2)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import BadGrid, EvalError, ParseError

HALF_LINE = "half_line"
FULL_LINE = "full_line"


# ---------------------------------------------------------------------------
# expression AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Call]

FUNCS = ("abs", "sqrt", "log", "exp")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)

_ATOM_START = frozenset({"NUMBER", "t", "(", *FUNCS})
_FACTOR_START = _ATOM_START | {"-"}


def _tokenize(source: str):
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(_byte_offset(source, pos), _FACTOR_START | {"+", "*", "/", "^", ")"}, source)
        kind = m.lastgroup
        text = m.group()
        if kind == "num":
            tokens.append(("NUMBER", text, pos))
        elif kind == "name":
            if text != "t" and text not in FUNCS:
                raise ParseError(_byte_offset(source, pos), _FACTOR_START, source)
            tokens.append((text, text, pos))
        elif kind == "op":
            tokens.append((text, text, pos))
        pos = m.end()
    tokens.append(("EOF", "", len(source)))
    return tokens


def _byte_offset(source, pos):
    return len(source[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, source):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def kind(self):
        return self.tokens[self.i][0]

    def fail(self, expected):
        pos = self.tokens[self.i][2]
        raise ParseError(_byte_offset(self.source, pos), expected, self.source)

    def expect(self, kind):
        if self.kind != kind:
            self.fail({kind})
        self.i += 1

    def parse(self):
        node = self.expr()
        if self.kind != "EOF":
            self.fail({"+", "-", "*", "/", "^", "EOF"})
        return node

    def expr(self):
        node = self.term()
        while self.kind in ("+", "-"):
            op = self.kind
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.kind in ("*", "/"):
            op = self.kind
            self.i += 1
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        if self.kind == "-":
            self.i += 1
            return Neg(self.factor())
        return self.power()

    def power(self):
        base = self.atom()
        if self.kind == "^":
            self.i += 1
            return BinOp("^", base, self.factor())
        return base

    def atom(self):
        kind, text, _ = self.tokens[self.i]
        if kind == "NUMBER":
            self.i += 1
            return Num(float(text))
        if kind == "t":
            self.i += 1
            return Var()
        if kind in FUNCS:
            self.i += 1
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Call(kind, arg)
        if kind == "(":
            self.i += 1
            node = self.expr()
            self.expect(")")
            return node
        self.fail(_FACTOR_START if kind != "-" else _ATOM_START)


def parse_expr(source: str) -> Expr:
    """Parse ``source`` into an expression tree.

    Raises
    ------
    ParseError
        With the byte offset of the offending token and the set of tokens
        that would have been accepted there.
    """
    return _Parser(source).parse()


def to_source(node: Expr) -> str:
    """Fully parenthesized source text; ``parse_expr(to_source(a)) == a``."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Neg):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)}{node.op}{to_source(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def _first_bad(t, mask):
    return float(t[np.flatnonzero(mask)[0]])


def _eval(node, t):
    if isinstance(node, Num):
        return np.full_like(t, node.value)
    if isinstance(node, Var):
        return t
    if isinstance(node, Neg):
        return -_eval(node.operand, t)
    if isinstance(node, Call):
        x = _eval(node.arg, t)
        if node.func == "abs":
            return np.abs(x)
        if node.func == "sqrt":
            bad = x < 0
            if bad.any():
                raise EvalError(_first_bad(t, bad), "sqrt of a negative number")
            return np.sqrt(x)
        if node.func == "log":
            bad = ~(x > 0)
            if bad.any():
                raise EvalError(_first_bad(t, bad), "log of a nonpositive number")
            return np.log(x)
        with np.errstate(over="ignore"):
            return np.exp(x)
    a = _eval(node.left, t)
    b = _eval(node.right, t)
    op = node.op
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        bad = b == 0
        if bad.any():
            raise EvalError(_first_bad(t, bad), "division by zero")
        return a / b
    bad = (a == 0) & (b < 0)
    if bad.any():
        raise EvalError(_first_bad(t, bad), "zero raised to a negative power")
    with np.errstate(invalid="ignore", over="ignore"):
        return np.power(a, b)


def eval_expr(ast: Expr, t):
    """Evaluate ``ast`` at ``t`` (scalar or array).

    Domain violations (log of a nonpositive argument, division by zero,
    ``0^negative``) and any non-finite result raise :class:`EvalError`
    naming the first offending ``t``.
    """
    scalar = np.ndim(t) == 0
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    out = _eval(ast, tt)
    bad = ~np.isfinite(out)
    if bad.any():
        raise EvalError(_first_bad(tt, bad), "non-finite value")
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# functions, grids, samples


@dataclass(frozen=True)
class ScalarFn:
    """A real function of the gap variable.

    ``evaluator`` must accept a float ndarray and return an array of the same
    shape; calling the ScalarFn with a Python float returns a float.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    domain_kind: str = FULL_LINE
    label: str = ""

    def __call__(self, t):
        scalar = np.ndim(t) == 0
        out = np.asarray(self.evaluator(np.atleast_1d(np.asarray(t, dtype=float))), dtype=float)
        return float(out[0]) if scalar else out

    def in_domain(self, t) -> bool:
        return self.domain_kind == FULL_LINE or bool(np.all(np.asarray(t) >= 0))


def expr_fn(source: str, label: str | None = None) -> ScalarFn:
    ast = parse_expr(source)
    return ScalarFn(lambda t: eval_expr(ast, t), FULL_LINE, label or source)


def symmetrize(phi: ScalarFn) -> ScalarFn:
    """Even extension ``t -> phi(|t|)`` of a half-line profile."""
    return ScalarFn(lambda t: phi.evaluator(np.abs(t)), FULL_LINE, f"sym({phi.label})")


@dataclass(frozen=True, eq=False)
class Grid:
    """Strictly increasing finite point list with at least three points."""

    points: np.ndarray

    def __post_init__(self):
        p = np.array(self.points, dtype=float).ravel()
        if p.size < 3:
            raise BadGrid(f"a grid needs at least 3 points, got {p.size}")
        if not np.all(np.isfinite(p)):
            raise BadGrid("grid points must be finite")
        if not np.all(np.diff(p) > 0):
            raise BadGrid("grid points must be strictly increasing")
        p.setflags(write=False)
        object.__setattr__(self, "points", p)

    def __len__(self):
        return self.points.size

    @property
    def t_min(self) -> float:
        return float(self.points[0])

    @property
    def t_max(self) -> float:
        return float(self.points[-1])

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.points, -self.points[::-1]))

    def nonnegative(self) -> Grid:
        return Grid(self.points[self.points >= 0])

    def reflected(self) -> Grid:
        """Symmetric grid ``{-|p|} U {|p|}`` built from the absolute values."""
        a = np.unique(np.abs(self.points))
        neg = -a[:0:-1] if a[0] == 0 else -a[::-1]
        return Grid(np.concatenate([neg, a]))


def uniform_grid(t_min: float, t_max: float, n: int) -> Grid:
    if not (np.isfinite(t_min) and np.isfinite(t_max)) or not t_min < t_max:
        raise BadGrid(f"need t_min < t_max, got {t_min!r}, {t_max!r}")
    if int(n) != n or n < 3:
        raise BadGrid(f"need an integer count >= 3, got {n!r}")
    p = np.linspace(t_min, t_max, int(n))
    if t_min == -t_max:
        # exact mirror symmetry, so even profiles sample to bitwise-even values
        p = 0.5 * (p - p[::-1])
    return Grid(p)


def geometric_grid(t_peak: float, t_max: float, n: int) -> Grid:
    """Symmetric grid, uniform on ``[-t_peak, t_peak]`` and geometrically
    stretched out to ``+-t_max``.

    ``n`` must be odd so that the grid contains 0. Half of the points on each
    side go to the uniform core, the other half to the stretched tail.
    """
    if not (0 < t_peak < t_max) or not np.isfinite(t_max):
        raise BadGrid(f"need 0 < t_peak < t_max, got {t_peak!r}, {t_max!r}")
    if int(n) != n or n < 5 or n % 2 == 0:
        raise BadGrid(f"need an odd integer count >= 5, got {n!r}")
    m = (int(n) - 1) // 2
    n_core = (m + 1) // 2
    n_tail = m - n_core
    core = np.linspace(0.0, t_peak, n_core + 1)
    tail = t_peak * np.geomspace(1.0, t_max / t_peak, n_tail + 1)[1:]
    if n_tail:
        tail[-1] = t_max
    pos = np.concatenate([core, tail])
    return Grid(np.concatenate([-pos[:0:-1], pos]))


@dataclass(frozen=True, eq=False)
class SampledFn:
    grid: Grid
    values: np.ndarray
    label: str = field(default="")

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size != len(self.grid):
            raise BadGrid(f"{v.size} values for {len(self.grid)} grid points")
        if not np.all(np.isfinite(v)):
            raise EvalError(float(self.grid.points[np.flatnonzero(~np.isfinite(v))[0]]), "non-finite sample")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def t(self) -> np.ndarray:
        return self.grid.points


def sample(fn: ScalarFn, grid: Grid) -> SampledFn:
    """Evaluate ``fn`` at every grid point; the first non-finite value raises."""
    pts = grid.points
    if fn.domain_kind == HALF_LINE and pts[0] < 0:
        raise EvalError(float(pts[0]), "outside the half-line domain")
    with np.errstate(all="ignore"):
        vals = np.asarray(fn.evaluator(pts), dtype=float)
    bad = ~np.isfinite(vals)
    if bad.any():
        raise EvalError(float(pts[np.flatnonzero(bad)[0]]), "non-finite value")
    return SampledFn(grid, vals, fn.label)
