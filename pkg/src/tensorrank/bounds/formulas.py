"""Closed-form rank bounds, evaluated exactly."""

from __future__ import annotations

import math
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Sequence

from ..constructions import floor_lg, hamming_weight
from ..errors import InvalidParams


def _need(cond: bool, msg: str):
    if not cond:
        raise InvalidParams(msg)


def combinatorial_t(n: int) -> int:
    _need(n >= 1, "n >= 1 required")
    return 2 * n - 2 * hamming_weight(n) + 1


def combinatorial_tprime(n: int) -> int:
    _need(n >= 2, "n >= 2 required")
    return 3 * n - 2 * hamming_weight(n - 1) - floor_lg(n - 1) - 2


def ceil_log(q: int, n: int) -> int:
    """Smallest ``k >= 0`` with ``q^k >= n``."""
    _need(q >= 2 and n >= 1, "q >= 2 and n >= 1 required")
    k, p = 0, 1
    while p < n:
        p *= q
        k += 1
    return k


def elimination_value(q: int, n: int, k: int | None = None) -> Fraction:
    """``n - k + n (q^k - 1) / (q^k - q^(k-1))`` as an exact rational."""
    _need(q >= 2 and n >= 1, "q >= 2 and n >= 1 required")
    k = ceil_log(q, n) if k is None else k
    _need(0 <= k <= n, "k must lie in [0, n]")
    qk = Fraction(q) ** k
    return n - k + (qk - 1) / (qk - qk / q) * n


def elimination(q: int, n: int, k: int | None = None) -> int:
    return math.ceil(elimination_value(q, n, k))


def interpolate_upper(n: int, d: int) -> int:
    _need(n >= 1 and d >= 1, "n, d >= 1 required")
    return d * (n - 1) + 1


def tightness_lower(n: int, d: int) -> int:
    _need(n >= 1 and d >= 1, "n, d >= 1 required")
    return (d - 1) * (n - 1) + 1


def repthy_upper(dims: Sequence[int], d: int) -> int:
    _need(all(D >= 1 for D in dims) and d >= 1, "dimensions and d must be >= 1")
    return sum(D**d for D in dims)


def repthy_cap(group_order: int, d: int) -> int:
    """``floor(|G|^(d/2))``."""
    _need(group_order >= 1 and d >= 1, "|G|, d >= 1 required")
    return math.isqrt(group_order**d)


def abelian_upper(orders: Sequence[int], d: int) -> int:
    _need(all(n >= 1 for n in orders) and d >= 1, "orders and d must be >= 1")
    return math.prod(d * (n - 1) + 1 for n in orders)


def _is_pow2(x: int) -> bool:
    return x >= 1 and x & (x - 1) == 0


def _floor_power(base: int, exponent_factor: int) -> int:
    """``floor(base^(1 + lg exponent_factor))``; exact when either argument is a power of two."""
    G, d = base, exponent_factor
    if _is_pow2(d):
        return G ** (1 + floor_lg(d))
    if _is_pow2(G):
        # G^(lg d) = d^(lg G)
        return G * d ** floor_lg(G)
    with localcontext() as ctx:
        ctx.prec = 60
        val = (Decimal(G).ln() * (1 + Decimal(d).ln() / Decimal(2).ln())).exp()
    r = int(val)
    # guard against rounding at the boundary
    while Decimal(r + 1) <= val:
        r += 1
    return r


def abelian_cap(group_order: int, d: int) -> int:
    """``floor(|G|^(1 + lg d))``."""
    _need(group_order >= 1 and d >= 1, "|G|, d >= 1 required")
    return _floor_power(group_order, d)


def anyfield_upper(group_order: int, d: int) -> int:
    """``floor(|G|^(1 + lg d)) * ceil(lg |G|)^(d-1)``."""
    _need(group_order >= 2 and d >= 1, "|G| >= 2 and d >= 1 required")
    return _floor_power(group_order, d) * ((group_order - 1).bit_length()) ** (d - 1)


def transfer_upper(m: int, d: int, r: int) -> int:
    _need(m >= 1 and d >= 1 and r >= 0, "m, d >= 1 and r >= 0 required")
    return m ** (d - 1) * r


def highorder(n: int, d: int) -> int:
    _need(n >= 2 and d >= 1, "n >= 2 and d >= 1 required")
    N = n**d
    return 2 * N + n - 2 * hamming_weight(N - 1) - floor_lg(N - 1) - 2


FORMULAS = {
    "combinatorial_t": combinatorial_t,
    "combinatorial_tprime": combinatorial_tprime,
    "elimination": elimination,
    "interpolate_upper": interpolate_upper,
    "tightness_lower": tightness_lower,
    "repthy_upper": repthy_upper,
    "repthy_cap": repthy_cap,
    "abelian_upper": abelian_upper,
    "abelian_cap": abelian_cap,
    "anyfield_upper": anyfield_upper,
    "transfer_upper": transfer_upper,
    "highorder": highorder,
}


def formula_bounds(name: str, **params) -> int:
    try:
        fn = FORMULAS[name]
    except KeyError:
        raise InvalidParams(f"unknown formula {name!r}") from None
    try:
        return fn(**params)
    except TypeError as exc:
        raise InvalidParams(f"bad parameters for {name}: {exc}") from exc
