"""
带同余约束的广义 Pell 方程 A*Y^2 - B*X^2 = N 的判定

代换 U = A*Y 后化为 U^2 - D*X^2 = M（D = A*B，M = A*N）。解类代表由连分数的
类搜索给出；每个类在基本单位作用下的轨道模 L = lcm(A, X 模数, A*Y 模数) 周期，
按 L 的素数幂分量分别穷举一个周期，再在指数上做 CRT 合并，得到 SAT 见证或可重放的
UNSAT 证书。
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from collections.abc import Iterable, Sequence
from functools import lru_cache

from sympy import factorint
from sympy.ntheory import sqrt_mod

from totient_pell.domain.errors import (
    CertificateError,
    PellResourceExceeded,
    PerfectSquareError,
)
from totient_pell.domain.models import (
    OrbitCheck,
    OrbitComponent,
    PellCertificate,
    PellDecision,
    PellInstance,
    QuadraticSurd,
    ResidueClass,
    SolutionClass,
    Variable,
    Verdict,
)
from totient_pell.numtheory.arith import crt, is_square, isqrt
from totient_pell.numtheory.cf import expand, expand_surd

logger = logging.getLogger(__name__)

DEFAULT_STEP_CAP = 10**7

# SAT 时每个起点尝试的最小 |n| 指数个数
_WITNESS_EXPONENTS = 3

Unit = tuple[int, int]
Point = tuple[int, int]


def fundamental_unit(D: int) -> Unit:
    """
    t^2 - D*w^2 = 1 的最小正解

    由 sqrt(D) 的连分数取 (p_{l-1}, q_{l-1})，周期 l 为奇数时再平方。

    Raises:
        PerfectSquareError: D 为完全平方数
    """
    if D < 1 or is_square(D):
        raise PerfectSquareError(f"D={D} is a perfect square")
    exp = expand(D, 1)
    length = exp.period_length
    p, q = exp.convergent(length - 1)
    if length % 2:
        p, q = p * p + D * q * q, 2 * p * q
    return p, q


def negative_unit(D: int) -> Unit | None:
    """t^2 - D*w^2 = -1 的最小正解，sqrt(D) 周期为偶数时不存在"""
    if D < 1 or is_square(D):
        raise PerfectSquareError(f"D={D} is a perfect square")
    exp = expand(D, 1)
    length = exp.period_length
    if length % 2 == 0:
        return None
    return exp.convergent(length - 1)


def multiply(point: Point, unit: Unit, D: int) -> Point:
    """(u + v*sqrt(D)) * (t + w*sqrt(D))"""
    u, v = point
    t, w = unit
    return u * t + v * w * D, u * w + v * t


def unit_power(unit: Unit, n: int, D: int) -> Unit:
    """单位的 n 次幂，n < 0 时用共轭"""
    base = unit if n >= 0 else (unit[0], -unit[1])
    n = abs(n)
    result: Unit = (1, 0)
    while n:
        if n & 1:
            result = multiply(result, base, D)
        base = multiply(base, base, D)
        n >>= 1
    return result


def reduce_to_fundamental(point: Point, unit: Unit, D: int) -> Point:
    """
    沿单位轨道下降到 |v| 最小的点

    |v_n| 沿轨道单峰，直接向较小的邻点走；并列时取 v >= 0 后 u 最大者，使结果
    只依赖于 ±单位轨道本身。
    """
    u, v = point
    conjugate = (unit[0], -unit[1])
    while True:
        forward = multiply((u, v), unit, D)
        backward = multiply((u, v), conjugate, D)
        best = min(forward, backward, key=lambda p: abs(p[1]))
        if abs(best[1]) >= abs(v):
            break
        u, v = best
    ties = [(u, v)] + [p for p in (forward, backward) if abs(p[1]) == abs(v)]
    return max(_sign_normalized(p) for p in ties)


def _sign_normalized(point: Point) -> Point:
    u, v = point
    if v < 0 or (v == 0 and u < 0):
        return -u, -v
    return u, v


def classical_bounds(D: int, M: int, unit: Unit) -> tuple[int, int]:
    """
    基本解 v 的经典范围（闭区间）

    M > 0: 0 <= v <= w*sqrt(M) / sqrt(2(t+1))
    M < 0: sqrt(|M|/D) <= v <= w*sqrt(|M|) / sqrt(2(t-1))
    """
    t, w = unit
    if M > 0:
        return 0, isqrt(w * w * M // (2 * (t + 1)))
    magnitude = -M
    low = isqrt(magnitude // D)
    while D * low * low < magnitude:
        low += 1
    return low, isqrt(w * w * magnitude // (2 * (t - 1)))


def _square_divisors(n: int) -> list[int]:
    """满足 f^2 | n 的全部 f >= 1"""
    divisors = [1]
    for p, e in factorint(abs(n)).items():
        divisors = [d * p**j for d in divisors for j in range(e // 2 + 1)]
    return sorted(divisors)


def _class_search(D: int, M: int) -> list[Point]:
    """对每个 f^2 | M 与 z^2 = D (mod |m|) 展开 (z + sqrt(D)) / |m|，寻找 t_i = ±1"""
    sign_fix = negative_unit(D)
    found: list[Point] = []
    for f in _square_divisors(M):
        m = M // (f * f)
        modulus = abs(m)
        if modulus == 1:
            roots = {0}
        else:
            residues = sqrt_mod(D, modulus, all_roots=True) or []
            roots = {r if r <= modulus // 2 else r - modulus for r in residues}
        for z in sorted(roots):
            exp = expand_surd(QuadraticSurd(z, modulus, D))
            limit = exp.preperiod_length + exp.period_length
            for i in range(1, limit + 1):
                if abs(exp.t(i)) != 1:
                    continue
                r = exp.g(i - 1)
                s = exp.convergent(i - 1)[1]
                if r * r - D * s * s == m:
                    found.append((f * r, f * s))
                elif sign_fix is not None:
                    found.append(multiply((f * r, f * s), sign_fix, D))
                break
    return found


def _to_classes(
    points: Iterable[Point], D: int, M: int, unit: Unit
) -> tuple[SolutionClass, ...]:
    bounds = classical_bounds(D, M, unit)
    reduced = {reduce_to_fundamental(p, unit, D) for p in points}
    ordered = sorted(reduced, key=lambda p: (p[1], p[0]))
    return tuple(SolutionClass(u, v, bounds) for u, v in ordered)


@lru_cache(maxsize=256)
def class_representatives(D: int, M: int) -> tuple[SolutionClass, ...]:
    """
    u^2 - D*v^2 = M 每个解类的基本解

    Args:
        D: 非平方正整数
        M: 非零整数

    Returns:
        按 (v, u) 排序的类代表；为空当且仅当方程无整数解

    Raises:
        PerfectSquareError: D 为完全平方数
    """
    if M == 0:
        raise ValueError("M must be nonzero")
    unit = fundamental_unit(D)
    classes = _to_classes(_class_search(D, M), D, M, unit)
    for cls in classes:
        if cls.u * cls.u - D * cls.v * cls.v != M:
            raise CertificateError(f"class search produced a non-solution {cls}")
        if not cls.v_bounds[0] <= cls.v <= cls.v_bounds[1]:
            raise CertificateError(f"representative {cls} outside the classical bounds")
    logger.debug(f"u^2 - {D}*v^2 = {M}: {len(classes)} classes")
    return classes


def bounded_representatives(D: int, M: int) -> tuple[SolutionClass, ...]:
    """在经典范围内直接穷举 v 得到的类代表（类搜索的独立对照）"""
    unit = fundamental_unit(D)
    low, high = classical_bounds(D, M, unit)
    points: list[Point] = []
    for v in range(low, high + 1):
        value = M + D * v * v
        if value >= 0 and is_square(value):
            root = isqrt(value)
            points.extend([(root, v), (-root, v)])
    return _to_classes(points, D, M, unit)


def orbit_modulus(inst: PellInstance) -> int:
    """L = lcm(A, X 模数, A * Y 模数)"""
    moduli = [inst.A]
    moduli.extend(c.modulus for c in inst.classes_for(Variable.X))
    moduli.extend(inst.A * c.modulus for c in inst.classes_for(Variable.Y))
    return math.lcm(*moduli)


def _prime_power_components(L: int) -> list[int]:
    return sorted(p**e for p, e in factorint(L).items())


def _component_orbit(
    inst: PellInstance, start: Point, modulus: int, unit: Unit, cap: int
) -> OrbitComponent:
    """起点模 modulus 的轨道周期，以及满足全部约束局部条件的指数"""
    A, D = inst.A, inst.D
    t, wD, w = unit[0] % modulus, unit[1] * D % modulus, unit[1] % modulus
    x_checks = [(c.residue, math.gcd(c.modulus, modulus)) for c in inst.classes_for(Variable.X)]
    u_checks = [(0, math.gcd(A, modulus))]
    u_checks.extend(
        (A * c.residue, math.gcd(A * c.modulus, modulus)) for c in inst.classes_for(Variable.Y)
    )
    origin = (start[0] % modulus, start[1] % modulus)
    u, v = origin
    admissible: list[int] = []
    j = 0
    while True:
        u_ok = all((u - r) % g == 0 for r, g in u_checks)
        if u_ok and all((v - r) % g == 0 for r, g in x_checks):
            admissible.append(j)
        u, v = (u * t + v * wD) % modulus, (u * w + v * t) % modulus
        j += 1
        if (u, v) == origin:
            return OrbitComponent(modulus, j, tuple(admissible))
        if j > cap:
            raise PellResourceExceeded(
                f"orbit of {start} mod {modulus} exceeds {cap} steps for {inst}", j, cap
            )


def _merge_exponents(components: Sequence[OrbitComponent], cap: int) -> tuple[int, ...]:
    """各分量可行指数集合的广义 CRT 合并，结果为模 lcm(周期) 的剩余"""
    period, merged = 1, [0]
    for comp in sorted(components, key=lambda c: (len(c.admissible), c.modulus)):
        g = math.gcd(period, comp.period)
        by_class: dict[int, list[int]] = defaultdict(list)
        for b in comp.admissible:
            by_class[b % g].append(b)
        combined: list[int] = []
        for a in merged:
            for b in by_class.get(a % g, ()):
                merged_class = crt([ResidueClass(a, period), ResidueClass(b, comp.period)])
                combined.append(merged_class.residue)
        if len(combined) > cap:
            raise PellResourceExceeded(
                f"merged exponent set exceeds {cap} residues", len(combined), cap
            )
        period = period // g * comp.period
        merged = sorted(combined)
        if not merged:
            break
    return tuple(merged)


def _starts(cls: SolutionClass) -> list[Point]:
    return sorted({(su * cls.u, sv * cls.v) for su in (1, -1) for sv in (1, -1)})


def _check_start(inst: PellInstance, start: Point, unit: Unit, L: int, cap: int) -> OrbitCheck:
    components: list[OrbitComponent] = []
    steps = 0
    for modulus in _prime_power_components(L):
        comp = _component_orbit(inst, start, modulus, unit, cap)
        steps += comp.period
        if steps > cap:
            raise PellResourceExceeded(
                f"orbit of {start} exceeds {cap} steps for {inst}", steps, cap
            )
        components.append(comp)
        if not comp.admissible:
            break
    combined = math.lcm(*(c.period for c in components)) if components else 1
    return OrbitCheck(start, tuple(components), combined, _merge_exponents(components, cap))


def _witness_key(point: tuple[int, int]) -> tuple[bool, int, int, bool, bool]:
    X, Y = point
    return (X == 0 or Y == 0, abs(Y), abs(X), X < 0, Y < 0)


def _witnesses(inst: PellInstance, check: OrbitCheck, unit: Unit) -> list[tuple[int, int]]:
    """合并指数中 |n| 最小的几个点及其满足约束的符号变体"""
    period = check.combined_period
    candidates = {n for a in check.merged for n in (a, a - period)}
    exponents = sorted(candidates, key=lambda n: (abs(n), n))
    found: list[tuple[int, int]] = []
    for n in exponents[:_WITNESS_EXPONENTS]:
        u, v = multiply(check.start, unit_power(unit, n, inst.D), inst.D)
        if u % inst.A:
            raise CertificateError(f"exponent {n} of {check.start} gives A not dividing u")
        X, Y = v, u // inst.A
        if not inst.satisfied_by(X, Y):
            raise CertificateError(f"admissible exponent {n} of {check.start} fails substitution")
        found.extend(
            (sx * X, sy * Y)
            for sx in (1, -1)
            for sy in (1, -1)
            if inst.satisfied_by(sx * X, sy * Y)
        )
    return found


def decide(inst: PellInstance, step_cap: int = DEFAULT_STEP_CAP) -> PellDecision:
    """
    判定 A*Y^2 - B*X^2 = N 在约束下是否有整数解

    Args:
        inst: Pell 实例
        step_cap: 每个起点的轨道步数上限，也是合并指数集合的大小上限

    Returns:
        SAT 带经代入验证的见证 (X, Y)；UNSAT 带可重放证书

    Raises:
        PerfectSquareError: A*B 为完全平方数
        PellResourceExceeded: 超过步数上限，判定未完成
    """
    D, M, A = inst.D, inst.M, inst.A
    unit = fundamental_unit(D)
    classes = class_representatives(D, M)
    included = tuple(c for c in classes if c.u % A == 0)
    excluded = tuple(c for c in classes if c.u % A != 0)
    L = orbit_modulus(inst)

    checks: list[OrbitCheck] = []
    witnesses: list[tuple[int, int]] = []
    for cls in included:
        for start in _starts(cls):
            check = _check_start(inst, start, unit, L, step_cap)
            checks.append(check)
            if check.merged:
                witnesses.extend(_witnesses(inst, check, unit))

    if witnesses:
        witness = min(witnesses, key=_witness_key)
        logger.debug(f"{inst}: SAT witness X={witness[0]} Y={witness[1]}")
        return PellDecision(Verdict.SAT, witness=witness)

    certificate = PellCertificate(
        unit=unit,
        representatives=included,
        excluded=excluded,
        modulus=L,
        checks=tuple(checks),
        checked_points=sum(c.period for check in checks for c in check.components),
    )
    logger.debug(
        f"{inst}: UNSAT over {len(classes)} classes, {certificate.checked_points} residue points"
    )
    return PellDecision(Verdict.UNSAT, certificate=certificate)


def verify_decision(
    inst: PellInstance, decision: PellDecision, step_cap: int = DEFAULT_STEP_CAP
) -> None:
    """
    重放判定：SAT 重新代入见证，UNSAT 重新计算单位、类代表、各分量轨道与合并

    Raises:
        CertificateError: 任何一项不一致
    """
    if decision.verdict is Verdict.SAT:
        if decision.witness is None or not inst.satisfied_by(*decision.witness):
            raise CertificateError(f"witness {decision.witness} does not satisfy {inst}")
        return

    cert = decision.certificate
    if cert is None:
        raise CertificateError("UNSAT decision without certificate")
    D, M, A = inst.D, inst.M, inst.A
    t, w = cert.unit
    if t * t - D * w * w != 1 or cert.unit != fundamental_unit(D):
        raise CertificateError(f"{cert.unit} is not the fundamental unit of {D}")
    classes = class_representatives(D, M)
    if set(cert.representatives) | set(cert.excluded) != set(classes):
        raise CertificateError("class representatives do not match a fresh class search")
    for cls in cert.representatives + cert.excluded:
        if cls.u * cls.u - D * cls.v * cls.v != M:
            raise CertificateError(f"{cls} does not solve u^2 - {D}v^2 = {M}")
    if any(cls.u % A == 0 for cls in cert.excluded):
        raise CertificateError("an excluded class has u divisible by A")
    if any(cls.u % A != 0 for cls in cert.representatives):
        raise CertificateError("an included class has u not divisible by A")
    if cert.modulus != orbit_modulus(inst):
        raise CertificateError(f"modulus {cert.modulus} != {orbit_modulus(inst)}")

    expected_starts = [start for cls in cert.representatives for start in _starts(cls)]
    if [check.start for check in cert.checks] != expected_starts:
        raise CertificateError("certificate does not cover every sign combination of every class")
    for check in cert.checks:
        replayed = _check_start(inst, check.start, cert.unit, cert.modulus, step_cap)
        if replayed != check:
            raise CertificateError(f"orbit replay of {check.start} differs")
        if check.merged:
            raise CertificateError(f"start {check.start} has admissible exponents")
    points = sum(c.period for check in cert.checks for c in check.components)
    if points != cert.checked_points:
        raise CertificateError(f"checked points {cert.checked_points} != {points}")


def brute_force_search(inst: PellInstance, bound: int) -> list[tuple[int, int]]:
    """|X|, |Y| <= bound 内的全部解，对 Y 枚举并做完全平方判定"""
    solutions: list[tuple[int, int]] = []
    for Y in range(-bound, bound + 1):
        rhs = inst.A * Y * Y - inst.N
        if rhs < 0 or rhs % inst.B:
            continue
        square = rhs // inst.B
        if not is_square(square):
            continue
        root = isqrt(square)
        if root > bound:
            continue
        for X in sorted({root, -root}):
            if inst.satisfied_by(X, Y):
                solutions.append((X, Y))
    return sorted(solutions)
