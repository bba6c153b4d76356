"""连分数展开单元测试"""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.ntheory.continued_fraction import continued_fraction_periodic

from totient_pell.domain.errors import PerfectSquareError
from totient_pell.domain.models import QuadraticSurd
from totient_pell.numtheory.arith import is_square
from totient_pell.numtheory.cf import convergent, expand, expand_surd, lemma_value
from totient_pell.numtheory.search import worley_decomposition

non_square_pairs = st.tuples(
    st.integers(min_value=1, max_value=5000), st.integers(min_value=1, max_value=5000)
).filter(lambda pair: not is_square(pair[0] * pair[1]))


def _sympy_terms(A: int, B: int, count: int) -> list[int]:
    expansion = continued_fraction_periodic(0, B, A * B)
    if expansion and isinstance(expansion[-1], list):
        head, period = [int(a) for a in expansion[:-1]], [int(a) for a in expansion[-1]]
    else:
        head, period = [int(a) for a in expansion], []
    terms = list(head)
    while len(terms) < count:
        terms.extend(period)
    return terms[:count]


def test_sqrt2():
    """测试 sqrt(2) = [1; 2, 2, ...]"""
    exp = expand(2, 1)
    assert exp.terms(5) == [1, 2, 2, 2, 2]
    assert exp.preperiod_length == 1
    assert exp.period_length == 1
    assert exp.convergents(3) == [(1, 1), (3, 2), (7, 5)]


def test_sqrt_three_halves():
    """测试 sqrt(3/2) = [1; 4, 2, 4, 2, ...] 及 s/t 表"""
    exp = expand(3, 2)
    assert exp.terms(5) == [1, 4, 2, 4, 2]
    assert [exp.s(k) for k in range(4)] == [0, 2, 2, 2]
    assert [exp.t(k) for k in range(4)] == [2, 1, 2, 1]
    assert exp.period_quotients == [4, 2]


def test_convergent_seeds():
    """测试 k = -1 与 k = -2 的初值"""
    exp = expand(7, 3)
    assert convergent(exp, -1) == (1, 0)
    assert exp.convergent(-2) == (0, 1)
    with pytest.raises(IndexError):
        convergent(exp, -2)


def test_perfect_square_rejected():
    """测试 A*B 为完全平方数时报错"""
    with pytest.raises(PerfectSquareError):
        expand(8, 2)
    with pytest.raises(ValueError):
        expand(0, 3)


def test_surd_normalization():
    """测试 Q 不整除 D - P^2 时同乘 |Q|"""
    surd = QuadraticSurd.normalized(0, 3, 7)
    assert surd == QuadraticSurd(0, 9, 63)
    exp = expand_surd(surd)
    # sqrt(7) / 3 = 0.88...
    assert exp.terms(2) == [0, 1]


@given(non_square_pairs)
@settings(max_examples=200, deadline=None)
def test_terms_match_sympy(pair):
    """测试部分商与 sympy 的周期连分数一致"""
    A, B = pair
    exp = expand(A, B)
    count = exp.preperiod_length + 2 * exp.period_length + 2
    assert exp.terms(count) == _sympy_terms(A, B, count)


@given(non_square_pairs)
@settings(max_examples=200, deadline=None)
def test_g_identity(pair):
    """测试 G_{k-1}^2 - D*q_{k-1}^2 = (-1)^k * t_k * t_0"""
    A, B = pair
    exp = expand(A, B)
    D = A * B
    for k in range(1, 25):
        _, q = exp.convergent(k - 1)
        sign = -1 if k % 2 else 1
        assert exp.g(k - 1) ** 2 - D * q * q == sign * exp.t(k) * exp.t(0)


def test_identity_for_random_c():
    """测试 200 个随机 c 的 sqrt((c+2)/(c-2)) 展开"""
    rng = random.Random(20240501)
    for _ in range(200):
        c = rng.randrange(3, 10**6)
        exp = expand(c + 2, c - 2)
        D = (c + 2) * (c - 2)
        for k in range(1, 2 * exp.period_length + 3):
            p, q = exp.convergent(k - 1)
            sign = -1 if k % 2 else 1
            assert (exp.g(k - 1) ** 2 - D * q * q) == sign * exp.t(k) * (c - 2)
            assert exp.g(k - 1) == (c - 2) * p


@given(
    non_square_pairs,
    st.integers(min_value=0, max_value=30),
    st.integers(min_value=-50, max_value=50),
    st.integers(min_value=-50, max_value=50),
)
@settings(deadline=None)
def test_lemma_value(pair, k, r, u):
    """测试 A*b^2 - B*a^2 等于 lemma_value"""
    A, B = pair
    exp = expand(A, B)
    p0, q0 = exp.convergent(k)
    p1, q1 = exp.convergent(k + 1)
    a = r * p1 + u * p0
    b = r * q1 + u * q0
    assert A * b * b - B * a * a == lemma_value(exp, k, r, u)
    assert worley_decomposition(exp, a, b, k) == (r, u)


def test_lemma_value_bulk():
    """测试 10^4 组随机 (A, B, k, r, u)，k <= 30"""
    rng = random.Random(3992)
    checked = 0
    while checked < 10**4:
        A, B = rng.randint(1, 5000), rng.randint(1, 5000)
        if is_square(A * B):
            continue
        exp = expand(A, B)
        k = rng.randint(0, 30)
        r, u = rng.randint(-1000, 1000), rng.randint(-1000, 1000)
        p0, q0 = exp.convergent(k)
        p1, q1 = exp.convergent(k + 1)
        a, b = r * p1 + u * p0, r * q1 + u * q0
        assert A * b * b - B * a * a == lemma_value(exp, k, r, u)
        checked += 1


def test_pattern_for_random_odd_c():
    """测试 200 个奇数 c 的 sqrt((c+2)/(c-2)) 部分商与 s/t 表"""
    rng = random.Random(9999)
    for _ in range(200):
        c = rng.randrange(5, 10000, 2)
        h = (c - 3) // 2
        exp = expand(c + 2, c - 2)
        assert exp.preperiod_length == 1
        assert exp.period_length == 6
        assert exp.terms(13) == [1] + [h, 1, 2 * c - 2, 1, h, 2] * 2
        assert [exp.s(k) for k in range(7)] == [0, c - 2, c - 4, c - 1, c - 1, c - 4, c - 2]
        assert [exp.t(k) for k in range(7)] == [c - 2, 4, 2 * c - 5, 1, 2 * c - 5, 4, c - 2]


@given(non_square_pairs)
@settings(max_examples=200, deadline=None)
def test_convergent_determinant_and_quality(pair):
    """测试 p_k q_{k-1} - p_{k-1} q_k = (-1)^(k-1) 与 |p_k/q_k - sqrt(A/B)| < 1/q_k^2"""
    A, B = pair
    exp = expand(A, B)
    for k in range(25):
        p, q = exp.convergent(k)
        p_prev, q_prev = exp.convergent(k - 1)
        assert p * q_prev - p_prev * q == (-1 if k % 2 == 0 else 1)
        # |p - q*sqrt(A/B)| < 1/q 两边乘 q 后平方
        lower = max(p * q - 1, 0)
        assert B * lower**2 < A * q**4 < B * (p * q + 1) ** 2
