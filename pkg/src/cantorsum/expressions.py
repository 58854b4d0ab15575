"""Closed-form differentiable expressions in ``x`` and ``lam``.

Coefficients c_i(lam), b_i(lam) and perturbations g_i(x, lam) are given as
short formulas (polynomials times sin/cos/exp) so that every partial
derivative the verifier needs is available exactly.
"""

from __future__ import annotations

import numpy as np
import sympy
from sympy.parsing.sympy_parser import parse_expr, standard_transformations

from .errors import ConfigError

X, LAM = sympy.symbols("x lam", real=True)

_FUNCTIONS = {"sin": sympy.sin, "cos": sympy.cos, "exp": sympy.exp}
_CONSTANTS = {"pi": sympy.pi, "E": sympy.E}
# names the standard parser transformations emit
_PARSER_NAMES = {"Float": sympy.Float, "Integer": sympy.Integer, "Rational": sympy.Rational, "Symbol": sympy.Symbol}


def parse(source, variables=("x", "lam"), params=None, field=None) -> sympy.Expr:
    """Parse a number or formula, substituting named ``params`` (e.g. sweep axes)."""
    if isinstance(source, bool):
        raise ConfigError("expected a number or formula, got a boolean", field)
    if isinstance(source, (int, float)):
        return sympy.Float(source) if isinstance(source, float) else sympy.Integer(source)
    if isinstance(source, sympy.Expr):
        expr = source
    elif isinstance(source, str):
        local = {"x": X, "lam": LAM, **_FUNCTIONS, **_CONSTANTS}
        for name in params or {}:
            local[name] = sympy.Symbol(name)
        try:
            expr = parse_expr(source, local_dict=local, global_dict={"__builtins__": {}, **_PARSER_NAMES},
                              transformations=standard_transformations, evaluate=True)
        except Exception as exc:  # sympy raises a zoo of types here
            raise ConfigError(f"cannot parse formula {source!r}: {exc}", field) from None
    else:
        raise ConfigError(f"expected a number or formula, got {type(source).__name__}", field)

    if params:
        expr = expr.subs({sympy.Symbol(k): sympy.Float(v) for k, v in params.items()})
    allowed = {X: "x", LAM: "lam"}
    for sym in expr.free_symbols:
        if sym not in allowed or allowed[sym] not in variables:
            raise ConfigError(f"unknown symbol {sym} in {source!r} (allowed: {', '.join(variables)})", field)
    for fn in expr.atoms(sympy.Function):
        if fn.func not in _FUNCTIONS.values():
            raise ConfigError(f"function {fn.func} not supported in {source!r}", field)
    if not expr.is_real and expr.free_symbols == set() and not expr.is_number:
        raise ConfigError(f"formula {source!r} is not real-valued", field)
    return expr


class Expression:
    """A vectorized callable ``f(x, lam)`` backed by a sympy expression."""

    def __init__(self, source=0, variables=("x", "lam"), params=None, field=None):
        self.variables = tuple(variables)
        self.expr = parse(source, self.variables, params, field)
        self._fn = sympy.lambdify((X, LAM), self.expr, modules="numpy")
        self.source = source if isinstance(source, str) else str(self.expr)

    @property
    def is_zero(self) -> bool:
        return self.expr == 0

    @property
    def is_constant(self) -> bool:
        return not self.expr.free_symbols

    def diff(self, var: str) -> Expression:
        sym = {"x": X, "lam": LAM}[var]
        return Expression(sympy.diff(self.expr, sym), self.variables)

    def __call__(self, x=0.0, lam=0.0):
        out = self._fn(x, lam)
        shape = np.broadcast_shapes(np.shape(x), np.shape(lam))
        if shape == ():
            return float(out)
        return np.broadcast_to(np.asarray(out, dtype=float), shape)

    def __repr__(self):
        return f"Expression({self.source!r})"
