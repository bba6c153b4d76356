"""
候选 c 的穷举与 X/Y 约束推导

(X, Y) 写成 d*(r*p_{k+1} + u*p_k, r*q_{k+1} + u*q_k)，代入
(c+2)Y^2 - (c-2)X^2 = -1996c + 4008 后对每个 k 得到 c 的有理表达式。
"""

from __future__ import annotations

import logging
from collections import defaultdict
from collections.abc import Callable, Iterable, Sequence
from functools import partial
from typing import TYPE_CHECKING

from sympy import factorint

from totient_pell.domain.errors import InconsistentResiduesError
from totient_pell.domain.models import (
    AxisBranch,
    AxisReport,
    CandidateC,
    CandidateTriple,
    Constraint,
    ConstraintBranch,
    PellInstance,
    ResidueClass,
    RuZeroCase,
    Variable,
)
from totient_pell.numtheory.arith import crt, is_square, isqrt, power_residue_set
from totient_pell.numtheory.cf import SurdExpansion

if TYPE_CHECKING:
    from totient_pell.adapters.executor import ParallelExecutor

logger = logging.getLogger(__name__)

DEFAULT_BOUND = 3992
C_CLASS = ResidueClass(17, 30)
X_CLASS = ResidueClass(4, 60)
Y_CLASS = ResidueClass(58, 60)
AXIS_SCAN_LIMIT = 7998
RU_ZERO_LIMIT = 63

# (常数, u^2, ru, r^2) 系数；分子分母均为 常数 + d^2 * (...)
_FORMULAS: dict[int, tuple[tuple[int, int, int, int], tuple[int, int, int, int]]] = {
    0: ((4008, -4, 8, -5), (1996, 0, 2, -2)),
    1: ((-4008, 5, 2, 1), (-1996, 2, 2, 0)),
    2: ((-4008, 1, -2, 5), (-1996, 0, -2, 2)),
    3: ((-4008, 5, 8, 4), (-1996, 2, 2, 0)),
    4: ((-4008, 4, -4, 2), (-1996, 0, -2, 1)),
    5: ((-4008, 2, 0, -2), (-1996, 1, 0, -1)),
}


def _evaluate(coefficients: tuple[int, int, int, int], d: int, r: int, u: int) -> int:
    const, uu, ru, rr = coefficients
    return const + d * d * (uu * u * u + ru * r * u + rr * r * r)


def c_formula(k: int, d: int, r: int, u: int) -> int | None:
    """
    第 k 个 c 表达式的精确值

    Returns:
        分母非零且商为正整数时返回 c，否则 None
    """
    if k not in _FORMULAS:
        raise ValueError(f"k must be in 0..5, got {k}")
    numerator_coeffs, denominator_coeffs = _FORMULAS[k]
    denominator = _evaluate(denominator_coeffs, d, r, u)
    if denominator == 0:
        return None
    quotient, remainder = divmod(_evaluate(numerator_coeffs, d, r, u), denominator)
    if remainder or quotient <= 0:
        return None
    return quotient


def _scan_d(k: int, bound: int, d: int) -> list[tuple[int, CandidateTriple]]:
    """固定 d，扫描 r >= 1、u != 0 且 d^2*|ru| < bound 的全部三元组"""
    limit = (bound - 1) // (d * d)
    hits: list[tuple[int, CandidateTriple]] = []
    for r in range(1, limit + 1):
        for magnitude in range(1, limit // r + 1):
            for u in (magnitude, -magnitude):
                c = c_formula(k, d, r, u)
                if c is not None:
                    hits.append((c, CandidateTriple(k, d, r, u)))
    return hits


def enumerate_candidates(
    k: int,
    bound: int = DEFAULT_BOUND,
    executor: ParallelExecutor | None = None,
    residue_filter: ResidueClass | None = C_CLASS,
) -> tuple[CandidateC, ...]:
    """
    穷举 d >= 1、r >= 1、u != 0、d^2*|ru| < bound 的三元组，收集满足 c = 17 (mod 30) 的 c

    Args:
        k: 公式编号 0..5
        bound: d^2*|ru| 的严格上界
        executor: 按 d 分片并行；None 时顺序执行
        residue_filter: c 的同余过滤，None 表示不过滤

    Returns:
        按 c 排序的 CandidateC，见证按 (k, d, r, u) 排序
    """
    if k not in _FORMULAS:
        raise ValueError(f"k must be in 0..5, got {k}")
    d_values = list(range(1, isqrt(bound - 1) + 1))
    scan: Callable[[int], list[tuple[int, CandidateTriple]]] = partial(_scan_d, k, bound)
    chunks: Iterable[list[tuple[int, CandidateTriple]]]
    chunks = executor.map(scan, d_values) if executor else map(scan, d_values)

    by_c: dict[int, list[CandidateTriple]] = defaultdict(list)
    for chunk in chunks:
        for c, triple in chunk:
            if residue_filter is None or residue_filter.contains(c):
                by_c[c].append(triple)

    candidates = tuple(
        CandidateC(c, tuple(sorted(by_c[c], key=lambda t: (t.k, t.d, t.r, t.u))))
        for c in sorted(by_c)
    )
    logger.debug(f"k={k}: {len(candidates)} candidates {[cand.c for cand in candidates]}")
    return candidates


def ru_zero_cases(limit: int = RU_ZERO_LIMIT) -> tuple[RuZeroCase, ...]:
    """
    ru = 0 的两族特例：(0, u) 给出 c = (4008 - 4d^2u^2) / 1996，
    (r, 0) 给出 c = (4008 - 5d^2r^2) / (1996 - 2d^2r^2)；d * 坐标 <= limit
    """
    cases: list[RuZeroCase] = []
    for d in range(1, limit + 1):
        for coordinate in range(1, limit // d + 1):
            square = d * d * coordinate * coordinate
            for family, numerator, denominator in (
                ("(0,u)", 4008 - 4 * square, 1996),
                ("(r,0)", 4008 - 5 * square, 1996 - 2 * square),
            ):
                if denominator == 0:
                    continue
                c, remainder = divmod(numerator, denominator)
                if remainder == 0 and c > 0:
                    cases.append(RuZeroCase(family, d, coordinate, c))
    return tuple(cases)


def _axis_branch(numerator: int, denominator: int) -> AxisBranch:
    if denominator == 0:
        return AxisBranch(numerator, denominator, False, False, None, False)
    value, remainder = divmod(numerator, denominator)
    if remainder:
        return AxisBranch(numerator, denominator, True, False, None, False)
    if not is_square(value):
        return AxisBranch(numerator, denominator, True, True, value, False)
    root = isqrt(value)
    return AxisBranch(numerator, denominator, True, True, value, True, tuple(sorted({-root, root})))


def axis_solutions(c: int) -> AxisReport:
    """
    坐标轴上的退化解

    X = 0: Y^2 = (-1996c + 4008) / (c + 2)
    Y = 0: X^2 = (1996c - 4008) / (c - 2)，c = 2 时无定义
    """
    if c < 1:
        raise ValueError(f"c must be positive, got {c}")
    return AxisReport(
        c=c,
        x_zero=_axis_branch(-1996 * c + 4008, c + 2),
        y_zero=_axis_branch(1996 * c - 4008, c - 2),
    )


def axis_scan(c_max: int = AXIS_SCAN_LIMIT) -> tuple[AxisReport, ...]:
    """对 1..c_max 逐个检查；c_max >= 7998 时覆盖 (c+2) | 8000 与 (c-2) | 16 的全部情形"""
    return tuple(axis_solutions(c) for c in range(1, c_max + 1))


def derive_xy_classes(period: int = 16) -> tuple[ResidueClass, ResidueClass]:
    """
    在完全剩余系上计算 X = cy - c - 2x 与 Y = cy - c - 2y 模 60

    x = 2^(a+1)（a = 0 mod 4，a >= 4），y = 5^(b+1)（b 偶数，b >= 2），c = 17 (mod 30)。
    2 与 5 的幂模 60 周期整除 4，period 个指数已覆盖全部情形。

    Raises:
        InconsistentResiduesError: 结果不是单一剩余类
    """
    xs = {pow(2, a + 1, 60) for a in range(4, 4 + 4 * period, 4)}
    ys = {pow(5, b + 1, 60) for b in range(2, 2 + 2 * period, 2)}
    cs = [c for c in range(60) if C_CLASS.contains(c)]
    X_values = {(c * y - c - 2 * x) % 60 for c in cs for x in xs for y in ys}
    Y_values = {(c * y - c - 2 * y) % 60 for c in cs for y in ys}
    if len(X_values) != 1 or len(Y_values) != 1:
        raise InconsistentResiduesError(f"X mod 60 in {X_values}, Y mod 60 in {Y_values}")
    return ResidueClass(X_values.pop(), 60), ResidueClass(Y_values.pop(), 60)


def refinement_primes(c: int) -> tuple[int, ...]:
    """c 的素因子，从大到小"""
    return tuple(sorted(factorint(c), reverse=True))


def _split_by_prime(branch: ConstraintBranch, q: int) -> list[ConstraintBranch]:
    """Y = c(y-1) - 2y = -2y (mod q)，y 为 5 的奇次幂"""
    residues = sorted(power_residue_set(5, q, -2, ResidueClass(1, 2)))
    split: list[ConstraintBranch] = []
    for r in residues:
        extra = ResidueClass(r, q)
        try:
            y_class = crt([branch.y_class, extra])
        except InconsistentResiduesError:
            logger.debug(f"c={branch.c}: Y = {extra} contradicts {branch.y_class}, branch dropped")
            continue
        split.append(
            ConstraintBranch(
                c=branch.c,
                x_class=branch.x_class,
                y_class=y_class,
                constituents=branch.constituents + (Constraint(Variable.Y, extra),),
                refined_by=branch.refined_by + ((q, r),),
            )
        )
    return split


def base_branch(c: int) -> ConstraintBranch:
    """{X = 4 (60), Y = 58 (60), Y = -2 (c-2)} 合并后的基本分支"""
    if not C_CLASS.contains(c):
        raise ValueError(f"c must be {C_CLASS}, got {c}")
    y_minus_two = ResidueClass.of(-2, c - 2)
    constituents = (
        Constraint(Variable.X, X_CLASS),
        Constraint(Variable.Y, Y_CLASS),
        Constraint(Variable.Y, y_minus_two),
    )
    return ConstraintBranch(c, X_CLASS, crt([Y_CLASS, y_minus_two]), constituents)


def refine(branch: ConstraintBranch, q: int) -> tuple[ConstraintBranch, ...]:
    """按素数 q | c 把分支拆成 Y mod q 的各个可行剩余"""
    if branch.c % q:
        raise ValueError(f"{q} does not divide c={branch.c}")
    return tuple(_split_by_prime(branch, q))


def derive_constraints(c: int, primes: Sequence[int] = ()) -> tuple[ConstraintBranch, ...]:
    """
    c 的约束分支

    Args:
        c: 满足 c = 17 (mod 30) 的候选
        primes: 依次用于细分的 c 的素因子

    Returns:
        基本分支依次按每个素数细分后的全部分支；CRT 矛盾的分支被丢弃
    """
    branches: tuple[ConstraintBranch, ...] = (base_branch(c),)
    for q in primes:
        branches = tuple(child for branch in branches for child in refine(branch, q))
    return branches


def pell_instance(branch: ConstraintBranch) -> PellInstance:
    """(c+2)Y^2 - (c-2)X^2 = -1996c + 4008 加上分支约束"""
    c = branch.c
    return PellInstance(
        A=c + 2,
        B=c - 2,
        N=-1996 * c + 4008,
        constraints=(
            Constraint(Variable.X, branch.x_class),
            Constraint(Variable.Y, branch.y_class),
        ),
    )


def worley_decomposition(expansion: SurdExpansion, a: int, b: int, k: int) -> tuple[int, int]:
    """
    解 (a, b) = (r*p_{k+1} + u*p_k, r*q_{k+1} + u*q_k)

    行列式 p_{k+1}q_k - p_k q_{k+1} = (-1)^k，解总是整数。
    """
    p0, q0 = expansion.convergent(k)
    p1, q1 = expansion.convergent(k + 1)
    sign = -1 if k % 2 else 1
    return sign * (a * q0 - b * p0), sign * (b * p1 - a * q1)
