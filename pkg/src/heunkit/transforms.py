"""Local-solution transforms: prefactor x parameter map x variable map.

Each registered transform asserts that

    prefactor(x) * Hl(a', q'; alpha', beta', gamma', delta'; xi(x))

solves the original equation with the untransformed parameters, where Hl
is the first-kind local series at 0 (unit normalization) and xi is a
Moebius-or-monomial change of variable. Nine rows are built in; they are
the seed of the machine-generated family of 192 local solutions related
by such maps, and the registry format lets users add more rows without
touching code.

Registry text format (one record per `transform` header; `#` comments):

    transform <id>
    prefactor: <base-expr> | <exponent-expr>    # zero or more lines
    a: <expr>        q: <expr>       alpha: <expr>
    beta: <expr>     gamma: <expr>   delta: <expr>
    variable: <expr>

Expressions use numbers, the parameter names a q alpha beta gamma delta
(plus x in prefactor/variable lines), the operators + - * /, and
parentheses. They are parsed into a tiny arithmetic tree that supports
exact symbolic differentiation in x, which the residual verifier uses for
the chain/product rule (no finite-difference step to tune).

Asymptotic branches of the transformed solutions are obtained by
composing the frozen-coefficient closed forms with (a', xi), never from a
separate per-row formula table. For the a' near -1 branch the composed
form keeps the odd companion stream with unit weight, i.e.
(1 + xi) * [1/(1 + xi^2/a')]; the module-level tail function drops that
stream, so the factor is applied here.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from . import asymptotics
from .errors import HeunkitError, NegativeBase, OutsideMappedRegion, OutsideRegion
from .params import HeunParams, Normalization, RootKind, indicial_roots, make_params
from .recurrence import build_series, eval_series, eval_series_derivs
from .series3trf import build_3trf_infinite

__all__ = [
    "AsymptoticBranch",
    "Engine",
    "LocalTransform",
    "ResidualReport",
    "apply_transform",
    "builtin_registry",
    "map_params",
    "mapped_point",
    "parse_registry",
    "residual_verify",
    "serialize_registry",
    "transform_asymptotic",
]

_PARAM_NAMES = ("a", "q", "alpha", "beta", "gamma", "delta")
_ALLOWED_NAMES = set(_PARAM_NAMES) | {"x"}


# ---------------------------------------------------------------------------
# tiny expression grammar


class _Expr:
    def ev(self, env: Mapping[str, float]) -> float:
        raise NotImplementedError

    def d(self, name: str) -> "_Expr":
        raise NotImplementedError


@dataclass(frozen=True)
class _Num(_Expr):
    value: float

    def ev(self, env):
        return self.value

    def d(self, name):
        return _Num(0.0)


@dataclass(frozen=True)
class _Var(_Expr):
    name: str

    def ev(self, env):
        return env[self.name]

    def d(self, name):
        return _Num(1.0 if self.name == name else 0.0)


@dataclass(frozen=True)
class _Bin(_Expr):
    op: str
    left: _Expr
    right: _Expr

    def ev(self, env):
        lv, rv = self.left.ev(env), self.right.ev(env)
        if self.op == "+":
            return lv + rv
        if self.op == "-":
            return lv - rv
        if self.op == "*":
            return lv * rv
        return lv / rv

    def d(self, name):
        lp, rp = self.left.d(name), self.right.d(name)
        if self.op in "+-":
            return _Bin(self.op, lp, rp)
        if self.op == "*":
            return _Bin("+", _Bin("*", lp, self.right), _Bin("*", self.left, rp))
        num = _Bin("-", _Bin("*", lp, self.right), _Bin("*", self.left, rp))
        return _Bin("/", num, _Bin("*", self.right, self.right))


@dataclass(frozen=True)
class _Neg(_Expr):
    inner: _Expr

    def ev(self, env):
        return -self.inner.ev(env)

    def d(self, name):
        return _Neg(self.inner.d(name))


def _convert(node: ast.AST) -> _Expr:
    if isinstance(node, ast.Expression):
        return _convert(node.body)
    if isinstance(node, ast.BinOp):
        ops = {ast.Add: "+", ast.Sub: "-", ast.Mult: "*", ast.Div: "/"}
        kind = type(node.op)
        if kind not in ops:
            raise ValueError(f"operator {kind.__name__} not in the registry grammar")
        return _Bin(ops[kind], _convert(node.left), _convert(node.right))
    if isinstance(node, ast.UnaryOp):
        if isinstance(node.op, ast.USub):
            return _Neg(_convert(node.operand))
        if isinstance(node.op, ast.UAdd):
            return _convert(node.operand)
        raise ValueError("only unary +/- allowed")
    if isinstance(node, ast.Name):
        if node.id not in _ALLOWED_NAMES:
            raise ValueError(f"unknown name {node.id!r} in registry expression")
        return _Var(node.id)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return _Num(float(node.value))
        raise ValueError(f"constant {node.value!r} not allowed")
    raise ValueError(f"syntax {type(node).__name__} not in the registry grammar")


@lru_cache(maxsize=1024)
def _parse(text: str) -> _Expr:
    return _convert(ast.parse(text, mode="eval"))


# ---------------------------------------------------------------------------
# transform records and registry


@dataclass(frozen=True)
class LocalTransform:
    """One registered local-solution map; expressions stored as source text."""

    id: str
    prefactor: tuple[tuple[str, str], ...]
    param_map: tuple[tuple[str, str], ...]
    var_map: str

    def params_env(self, p: HeunParams) -> dict[str, float]:
        return {
            "a": p.a,
            "q": p.q,
            "alpha": p.alpha,
            "beta": p.beta,
            "gamma": p.gamma,
            "delta": p.delta,
        }

    def mapped_values(self, p: HeunParams) -> dict[str, float]:
        env = self.params_env(p)
        return {name: _parse(expr).ev(env) for name, expr in self.param_map}

    def variable(self, p: HeunParams, x: float) -> float:
        env = self.params_env(p)
        env["x"] = x
        return _parse(self.var_map).ev(env)

    def variable_derivs(self, p: HeunParams, x: float) -> tuple[float, float, float]:
        env = self.params_env(p)
        env["x"] = x
        e = _parse(self.var_map)
        e1 = e.d("x")
        e2 = e1.d("x")
        return e.ev(env), e1.ev(env), e2.ev(env)

    def prefactor_value(self, p: HeunParams, x: float) -> float:
        env = self.params_env(p)
        env["x"] = x
        out = 1.0
        for base_s, exp_s in self.prefactor:
            out *= _real_power(_parse(base_s).ev(env), _parse(exp_s).ev(env))
        return out

    def prefactor_derivs(self, p: HeunParams, x: float) -> tuple[float, float, float]:
        """(P, P', P'') by the product/log-derivative rule, bases symbolic."""
        env = self.params_env(p)
        env["x"] = x
        value = 1.0
        log_d1 = 0.0  # P'/P
        log_d2 = 0.0  # (P'/P)' accumulated per factor
        for base_s, exp_s in self.prefactor:
            b = _parse(base_s)
            e = _parse(exp_s).ev(env)
            bv = b.ev(env)
            b1 = b.d("x").ev(env)
            b2 = b.d("x").d("x").ev(env)
            value *= _real_power(bv, e)
            log_d1 += e * b1 / bv
            log_d2 += e * (b2 * bv - b1 * b1) / (bv * bv)
        p1 = value * log_d1
        p2 = value * (log_d1 * log_d1 + log_d2)
        return value, p1, p2


def _real_power(base: float, expo: float) -> float:
    if expo == 0.0:
        return 1.0
    if base == 0.0:
        if expo > 0.0:
            return 0.0
        raise NegativeBase(f"0 raised to nonpositive exponent {expo}")
    if base < 0.0:
        if expo == math.floor(expo):
            return base**expo
        raise NegativeBase(f"base {base} < 0 with non-integer exponent {expo}")
    return base**expo


def parse_registry(text: str) -> dict[str, LocalTransform]:
    """Parse registry text (format in the module docstring) into records."""
    records: dict[str, LocalTransform] = {}
    current: dict | None = None

    def flush():
        nonlocal current
        if current is None:
            return
        missing = [n for n in _PARAM_NAMES if n not in current["map"]]
        if missing or current["var"] is None:
            raise ValueError(f"transform {current['id']!r}: missing {missing or 'variable'}")
        # parse everything now so malformed expressions fail at load time
        _parse(current["var"])
        for pair in current["prefactor"]:
            _parse(pair[0])
            _parse(pair[1])
        for name in _PARAM_NAMES:
            _parse(current["map"][name])
        records[current["id"]] = LocalTransform(
            id=current["id"],
            prefactor=tuple(current["prefactor"]),
            param_map=tuple((n, current["map"][n]) for n in _PARAM_NAMES),
            var_map=current["var"],
        )
        current = None

    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("transform "):
            flush()
            current = {"id": line.split(None, 1)[1].strip(), "prefactor": [], "map": {}, "var": None}
            continue
        if current is None:
            raise ValueError(f"registry line outside a transform record: {raw!r}")
        key, _, rest = line.partition(":")
        key = key.strip()
        rest = rest.strip()
        if key == "prefactor":
            base_s, sep, exp_s = rest.partition("|")
            if not sep:
                raise ValueError(f"prefactor line needs 'base | exponent': {raw!r}")
            current["prefactor"].append((base_s.strip(), exp_s.strip()))
        elif key == "variable":
            current["var"] = rest
        elif key in _PARAM_NAMES:
            current["map"][key] = rest
        else:
            raise ValueError(f"unknown registry key {key!r}")
    flush()
    return records


def serialize_registry(transforms: Iterable[LocalTransform]) -> str:
    lines: list[str] = []
    for t in transforms:
        lines.append(f"transform {t.id}")
        for base_s, exp_s in t.prefactor:
            lines.append(f"prefactor: {base_s} | {exp_s}")
        for name, expr in t.param_map:
            lines.append(f"{name}: {expr}")
        lines.append(f"variable: {t.var_map}")
        lines.append("")
    return "\n".join(lines)


# The nine built-in rows. Exponent flips move a local exponent pair into the
# prefactor (e.g. delta -> 2-delta with (1-x)^(1-delta)); variable maps
# permute the singular points {0, 1, a, inf}.
_BUILTIN_TEXT = """
transform delta-flip
prefactor: 1 - x | 1 - delta
a: a
q: q - (delta - 1)*gamma*a
alpha: alpha - delta + 1
beta: beta - delta + 1
gamma: gamma
delta: 2 - delta
variable: x

transform gamma-delta-flip
prefactor: x | 1 - gamma
prefactor: 1 - x | 1 - delta
a: a
q: q - (gamma + delta - 2)*a - (gamma - 1)*(alpha + beta - gamma - delta + 1)
alpha: alpha - gamma - delta + 2
beta: beta - gamma - delta + 2
gamma: 2 - gamma
delta: 2 - delta
variable: x

transform swap-0-1
a: 1 - a
q: -q + alpha*beta
alpha: alpha
beta: beta
gamma: delta
delta: gamma
variable: 1 - x

transform swap-0-1-delta-flip
prefactor: 1 - x | 1 - delta
a: 1 - a
q: -q + (delta - 1)*gamma*a + (alpha - delta + 1)*(beta - delta + 1)
alpha: alpha - delta + 1
beta: beta - delta + 1
gamma: 2 - delta
delta: gamma
variable: 1 - x

transform invert-x
prefactor: x | -alpha
a: 1/a
q: (q + alpha*((alpha - gamma - delta + 1)*a - beta + delta))/a
alpha: alpha
beta: alpha - gamma + 1
gamma: alpha - beta + 1
delta: delta
variable: 1/x

transform swap-a-inf
prefactor: 1 - x/a | -beta
a: 1 - a
q: -q + gamma*beta
alpha: -alpha + gamma + delta
beta: beta
gamma: gamma
delta: delta
variable: (1 - a)*x/(x - a)

transform swap-a-inf-delta-flip
prefactor: 1 - x | 1 - delta
prefactor: 1 - x/a | -beta + delta - 1
a: 1 - a
q: -q + gamma*((delta - 1)*a + beta - delta + 1)
alpha: -alpha + gamma + 1
beta: beta - delta + 1
gamma: gamma
delta: 2 - delta
variable: (1 - a)*x/(x - a)

transform cycle-0-1-inf
prefactor: x | -alpha
a: (a - 1)/a
q: (-q + alpha*(delta*a + beta - delta))/a
alpha: alpha
beta: alpha - gamma + 1
gamma: delta
delta: alpha - beta + 1
variable: (x - 1)/x

transform double-swap
prefactor: (x - a)/(1 - a) | -alpha
a: a
q: q - (beta - delta)*alpha
alpha: alpha
beta: -beta + gamma + delta
gamma: delta
delta: gamma
variable: a*(x - 1)/(x - a)
"""

_REGISTRY = parse_registry(_BUILTIN_TEXT)


def builtin_registry() -> dict[str, LocalTransform]:
    """The nine built-in transform rows, keyed by id."""
    return dict(_REGISTRY)


# ---------------------------------------------------------------------------
# application, asymptotics, verification


class Engine(Enum):
    RECURRENCE = "recurrence"
    TRF3 = "trf3"


class AsymptoticBranch(Enum):
    INFINITE = "infinite"
    NEAR_MINUS_ONE = "near-minus-one"
    LARGE_A = "large-a"


def map_params(t: LocalTransform, p: HeunParams) -> HeunParams:
    """Mapped parameter record (validated: mapped a must stay nonzero)."""
    vals = t.mapped_values(p)
    return make_params(vals["a"], vals["q"], vals["alpha"], vals["beta"], vals["gamma"], vals["delta"])


def mapped_point(t: LocalTransform, p: HeunParams, x: float) -> tuple[HeunParams, float]:
    return map_params(t, p), t.variable(p, x)


def apply_transform(
    t: LocalTransform,
    p: HeunParams,
    x: float,
    engine: Engine = Engine.RECURRENCE,
    N: int = 200,
) -> float:
    """prefactor(x) times the mapped first-kind local series at xi(x).

    The mapped point must lie in the convergence region of the mapped
    parameters (classified on (a', xi)); OutsideMappedRegion otherwise.
    N is the series truncation order (recurrence engine) or the outer
    block count (regrouped-sum engine).
    """
    pm, xi = mapped_point(t, p, x)
    if not asymptotics.classify_region(pm.a, xi).contains_x:
        raise OutsideMappedRegion(f"xi = {xi} outside the region of mapped a' = {pm.a}")
    first = indicial_roots(pm)[0]
    c0 = Normalization(1.0)
    if engine is Engine.RECURRENCE:
        series = build_series(pm, first, c0, N)
        val = eval_series(series, xi).value
    else:
        val = build_3trf_infinite(pm, first, c0, M=N, I_max=max(60, N), x=xi).value
    return t.prefactor_value(p, x) * val


def _tail_params(ap: float) -> HeunParams:
    # the frozen-coefficient tails depend on a alone
    return HeunParams(a=ap, q=0.0, alpha=1.0, beta=1.0, gamma=1.0, delta=1.0)


def transform_asymptotic(
    t: LocalTransform,
    p: HeunParams,
    x: float,
    branch: AsymptoticBranch = AsymptoticBranch.INFINITE,
) -> float:
    """Frozen-coefficient closed form of the transformed solution at x.

    Composes the untransformed closed forms with (a', xi). The near -1
    branch keeps the odd companion stream with unit weight, giving
    (1 + xi) / (1 + xi^2/a').
    """
    pm_a = t.mapped_values(p)["a"]
    xi = t.variable(p, x)
    try:
        if branch is AsymptoticBranch.INFINITE:
            return asymptotics.geometric_tail(_tail_params(pm_a), xi)
        if branch is AsymptoticBranch.NEAR_MINUS_ONE:
            return (1.0 + xi) * asymptotics.tail_near_minus_one(_tail_params(pm_a), xi)
        return asymptotics.tail_large_a(_tail_params(pm_a), xi)
    except OutsideRegion as exc:
        raise OutsideMappedRegion(str(exc)) from exc


@dataclass(frozen=True)
class ResidualReport:
    transform_id: str
    samples: tuple[float, ...]
    residuals: tuple[float, ...]
    max_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tol


def residual_verify(
    t: LocalTransform,
    p: HeunParams,
    x_samples: Sequence[float],
    N: int = 200,
    tol: float = 1e-8,
) -> ResidualReport:
    """Max residual of the original equation over the samples.

    The candidate solution is prefactor(x) * series(mapped params, xi(x));
    its derivatives are assembled analytically (term-wise series
    derivatives, symbolic prefactor/variable derivatives, chain rule).
    Reports, never raises on a large residual.
    """
    pm = map_params(t, p)
    first = indicial_roots(pm)[0]
    series = build_series(pm, first, Normalization(1.0), N)
    residuals = []
    for x in x_samples:
        xi, xi1, xi2 = t.variable_derivs(p, x)
        y, y1, y2 = eval_series_derivs(series, xi)
        pv, p1, p2 = t.prefactor_derivs(p, x)
        f = pv * y
        f1 = p1 * y + pv * y1 * xi1
        f2 = p2 * y + 2.0 * p1 * y1 * xi1 + pv * (y2 * xi1 * xi1 + y1 * xi2)
        pcoef = p.gamma / x + p.delta / (x - 1.0) + p.epsilon / (x - p.a)
        qcoef = (p.alpha * p.beta * x - p.q) / (x * (x - 1.0) * (x - p.a))
        residuals.append(abs(f2 + pcoef * f1 + qcoef * f))
    mx = max(residuals) if residuals else 0.0
    return ResidualReport(
        transform_id=t.id,
        samples=tuple(float(x) for x in x_samples),
        residuals=tuple(residuals),
        max_residual=mx,
        tol=tol,
    )
