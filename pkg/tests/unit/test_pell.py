"""Pell 判定单元测试"""

import dataclasses
import math
import random

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from totient_pell.domain.errors import CertificateError, PellResourceExceeded, PerfectSquareError
from totient_pell.domain.models import (
    Constraint,
    PellDecision,
    PellInstance,
    ResidueClass,
    Variable,
    Verdict,
)
from totient_pell.numtheory.arith import is_square
from totient_pell.numtheory.pell import (
    bounded_representatives,
    brute_force_search,
    class_representatives,
    classical_bounds,
    decide,
    fundamental_unit,
    multiply,
    negative_unit,
    orbit_modulus,
    reduce_to_fundamental,
    unit_power,
    verify_decision,
)
from totient_pell.numtheory.cf import expand
from totient_pell.numtheory.search import (
    DEFAULT_BOUND,
    base_branch,
    pell_instance,
    refine,
    worley_decomposition,
)

BASE_CASES = [17, 227, 647, 857, 2537, 3107, 4937]
BRANCHES_497 = [11878, 27718, 61378, 1978, 140578]
# 经典范围穷举的 v 上界，超过则跳过该样例
BOUNDED_SCAN_LIMIT = 20_000


def _y_constraints(*classes: ResidueClass) -> tuple[Constraint, ...]:
    return tuple(Constraint(Variable.Y, cls) for cls in classes)


def test_fundamental_unit_small():
    """测试 D = 2、3 的基本单位"""
    assert fundamental_unit(2) == (3, 2)
    assert fundamental_unit(3) == (2, 1)
    assert negative_unit(2) == (1, 1)
    assert negative_unit(3) is None


def test_fundamental_unit_285_is_minimal():
    """测试 D = 285 的基本单位与暴力搜索的最小解一致"""
    t, w = fundamental_unit(285)
    assert t * t - 285 * w * w == 1
    minimal = next(v for v in range(1, 10**4 + 1) if is_square(285 * v * v + 1))
    assert w == minimal
    assert (t, w) == (2431, 144)


def test_fundamental_unit_perfect_square():
    """测试完全平方 D 报错"""
    with pytest.raises(PerfectSquareError):
        fundamental_unit(4)


def test_unit_power_and_conjugate():
    """测试单位的正负次幂"""
    unit = fundamental_unit(2)
    assert unit_power(unit, 0, 2) == (1, 0)
    assert unit_power(unit, 2, 2) == (17, 12)
    assert multiply(unit_power(unit, 3, 2), unit_power(unit, -3, 2), 2) == (1, 0)


def test_class_representatives_small():
    """测试 u^2 - 2v^2 = -1 与 u^2 - 3v^2 = -1"""
    assert [(c.u, c.v) for c in class_representatives(2, -1)] == [(1, 1)]
    assert class_representatives(3, -1) == ()


def test_class_representatives_c17():
    """测试 c = 17 的类代表与经典范围穷举一致，且单位作用保持方程"""
    D, M = 285, 19 * -29924
    classes = class_representatives(D, M)
    assert classes == bounded_representatives(D, M)
    unit = fundamental_unit(D)
    for cls in classes:
        u, v = multiply((cls.u, cls.v), unit, D)
        assert u * u - D * v * v == M
        assert cls.v_bounds[0] <= cls.v <= cls.v_bounds[1]


@given(
    st.integers(min_value=2, max_value=200).filter(lambda d: not is_square(d)),
    st.integers(min_value=-500, max_value=500).filter(lambda m: m != 0),
)
@settings(max_examples=150, deadline=None)
def test_class_search_matches_bounded_scan(D, M):
    """测试连分数类搜索与经典范围穷举给出相同的类代表"""
    assume(classical_bounds(D, M, fundamental_unit(D))[1] <= BOUNDED_SCAN_LIMIT)
    assert class_representatives(D, M) == bounded_representatives(D, M)


def test_reduce_to_fundamental_is_orbit_invariant():
    """测试同一轨道上的点约化到同一个代表"""
    unit = fundamental_unit(2)
    assert multiply(multiply((1, 1), unit, 2), unit, 2) == (41, 29)
    assert reduce_to_fundamental((41, 29), unit, 2) == (1, 1)
    assert reduce_to_fundamental((-1, 1), unit, 2) == (1, 1)
    assert reduce_to_fundamental((-41, -29), unit, 2) == (1, 1)


def test_decide_trivial_sat():
    """测试 Y^2 - 2X^2 = 1 的见证为 (2, 3)"""
    inst = PellInstance(1, 2, 1)
    decision = decide(inst)
    assert decision.verdict is Verdict.SAT
    assert decision.witness == (2, 3)
    verify_decision(inst, decision)


def test_brute_force_search_trivial():
    """测试暴力搜索包含 (0, ±1) 与 (±2, ±3)"""
    solutions = brute_force_search(PellInstance(1, 2, 1), 10)
    for point in [(0, 1), (0, -1), (2, 3), (-2, 3), (2, -3), (-2, -3)]:
        assert point in solutions
    assert brute_force_search(PellInstance(1, 3, -1), 50) == []


def test_decide_with_constraints_sat():
    """测试约束下的 SAT：Y^2 - 2X^2 = 1 且 Y = 1 (mod 4)"""
    inst = PellInstance(1, 2, 1, _y_constraints(ResidueClass(1, 4)))
    decision = decide(inst)
    assert decision.verdict is Verdict.SAT
    assert decision.witness is not None
    assert inst.satisfied_by(*decision.witness)
    verify_decision(inst, decision)


def test_decide_unsat_without_solutions():
    """测试无整数解的方程为 UNSAT 且证书可重放"""
    inst = PellInstance(1, 3, -1)
    decision = decide(inst)
    assert decision.verdict is Verdict.UNSAT
    assert decision.certificate is not None
    assert decision.certificate.representatives == ()
    verify_decision(inst, decision)


def test_orbit_modulus():
    """测试 L = lcm(A, X 模数, A*Y 模数)"""
    inst = pell_instance(base_branch(17))
    assert orbit_modulus(inst) == 19 * 60


@pytest.mark.parametrize("c", BASE_CASES)
def test_base_instances_unsat(c):
    """测试各个候选 c 的基本约束实例为 UNSAT"""
    inst = pell_instance(base_branch(c))
    decision = decide(inst)
    assert decision.verdict is Verdict.UNSAT
    verify_decision(inst, decision)


def test_c17_instance_form():
    """测试 c = 17 的实例为 19Y^2 - 15X^2 = -29924"""
    inst = pell_instance(base_branch(17))
    assert (inst.A, inst.B, inst.N) == (19, 15, -29924)
    assert inst.classes_for(Variable.X) == (ResidueClass(4, 60),)
    assert inst.classes_for(Variable.Y) == (ResidueClass(58, 60),)


def test_c497_branches_unsat():
    """测试 c = 497 按 71 细分后的五个分支均为 UNSAT"""
    branches = refine(base_branch(497), 71)
    assert [b.y_class for b in branches] == [ResidueClass(r, 140580) for r in BRANCHES_497]
    for branch in branches:
        inst = pell_instance(branch)
        assert (inst.A, inst.B, inst.N) == (499, 495, -988004)
        decision = decide(inst)
        assert decision.verdict is Verdict.UNSAT
        verify_decision(inst, decision)


def test_verify_rejects_tampered_certificate():
    """测试篡改后的证书无法通过重放"""
    inst = pell_instance(base_branch(17))
    decision = decide(inst)
    assert decision.certificate is not None
    tampered = dataclasses.replace(
        decision.certificate, checked_points=decision.certificate.checked_points + 1
    )
    with pytest.raises(CertificateError):
        verify_decision(inst, PellDecision(Verdict.UNSAT, certificate=tampered))
    with pytest.raises(CertificateError):
        verify_decision(inst, PellDecision(Verdict.UNSAT))


def test_verify_rejects_wrong_witness():
    """测试错误的见证无法通过验证"""
    inst = PellInstance(1, 2, 1)
    with pytest.raises(CertificateError):
        verify_decision(inst, PellDecision(Verdict.SAT, witness=(1, 1)))


def test_step_cap_exceeded():
    """测试超过步数上限时报错而不是给出判定"""
    inst = PellInstance(1, 2, 1, (Constraint(Variable.X, ResidueClass(0, 97)),))
    with pytest.raises(PellResourceExceeded) as excinfo:
        decide(inst, step_cap=2)
    assert excinfo.value.cap == 2


def test_decide_is_deterministic():
    """测试相同实例给出相同判定与证书"""
    inst = pell_instance(base_branch(227))
    assert decide(inst) == decide(inst)


def test_oracle_agreement():
    """测试 100 个随机无约束实例上判定与暴力搜索一致"""
    rng = random.Random(1996)
    checked = 0
    while checked < 100:
        A, B = rng.randint(1, 50), rng.randint(1, 50)
        N = rng.choice([-1, 1]) * rng.randint(1, 1000)
        if is_square(A * B):
            continue
        inst = PellInstance(A, B, N)
        decision = decide(inst)
        found = brute_force_search(inst, 5000)
        if found:
            assert decision.verdict is Verdict.SAT, inst
        if decision.verdict is Verdict.SAT:
            assert decision.witness is not None
            assert inst.satisfied_by(*decision.witness)
        else:
            assert found == [], inst
        checked += 1


def _short_representation(A: int, B: int, X: int, Y: int) -> tuple[int, int, int, float]:
    """把正解约去 d = gcd(X, Y) 后写成 (r p_{k+1} + u p_k, r q_{k+1} + u q_k)，返回 |ru| 最小的那组"""
    d = math.gcd(X, Y)
    a, b = X // d, Y // d
    reduced = (A * Y * Y - B * X * X) // (d * d)
    # |sqrt(A/B) - a/b| = H / b^2
    two_h = 2 * abs(reduced) / (B * (math.sqrt(A / B) + a / b))
    exp = expand(A, B)
    best: tuple[int, int] | None = None
    # 渐近分数分母超过 b 之后再多试几项
    k, extra = -1, 0
    while extra < 3:
        r, u = worley_decomposition(exp, a, b, k)
        if best is None or abs(r * u) < abs(best[0] * best[1]):
            best = (r, u)
        if exp.convergent(k)[1] > b:
            extra += 1
        k += 1
    assert best is not None
    return d, best[0], best[1], two_h


def test_solutions_have_short_representation():
    """测试每个正解都能由相邻渐近分数以 |ru| < 2H 表示"""
    rng = random.Random(1996)
    checked = 0
    while checked < 40:
        A, B = rng.randint(2, 60), rng.randint(2, 60)
        N = rng.choice([-1, 1]) * rng.randint(1, 400)
        if is_square(A * B):
            continue
        solutions = [
            (X, Y) for X, Y in brute_force_search(PellInstance(A, B, N), 2000) if X > 0 and Y > 0
        ]
        if not solutions:
            continue
        for X, Y in solutions:
            _, r, u, two_h = _short_representation(A, B, X, Y)
            assert abs(r * u) < two_h + 1e-9, (A, B, N, X, Y)
        checked += 1


@pytest.mark.parametrize("c", [17, 227, 497])
def test_candidate_equation_solutions_within_bound(c):
    """测试候选 c 的无约束方程的小解都满足 d^2 |ru| < 3992"""
    inst = pell_instance(base_branch(c)).unconstrained()
    for X, Y in brute_force_search(inst, 3000):
        if X <= 0 or Y <= 0:
            continue
        d, r, u, two_h = _short_representation(inst.A, inst.B, X, Y)
        assert abs(r * u) < two_h + 1e-9
        assert d * d * abs(r * u) < DEFAULT_BOUND
