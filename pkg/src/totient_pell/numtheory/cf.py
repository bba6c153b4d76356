"""二次根式的周期连分数：部分商 a_k、伴随序列 s_k / t_k 与渐近分数 p_k / q_k"""

from __future__ import annotations

import logging
import math
import threading
from functools import lru_cache

from totient_pell.domain.models import QuadraticSurd

logger = logging.getLogger(__name__)


class SurdExpansion:
    """
    (P + sqrt(D)) / Q 的连分数展开

    构造时一次性求出预周期与周期（(s, t) 首次重复），部分商与 s/t 表之后按周期
    取下标；渐近分数按需扩展，扩展在锁内进行。
    """

    def __init__(self, surd: QuadraticSurd) -> None:
        self.surd = surd
        self._root = math.isqrt(surd.D)
        self._lock = threading.Lock()
        self._s: list[int] = []
        self._t: list[int] = []
        self._a: list[int] = []
        # 下标偏移 2：位置 0、1 对应 k = -2、-1
        self._p: list[int] = [0, 1]
        self._q: list[int] = [1, 0]
        self._detect_period()

    def _floor_quotient(self, s: int, t: int) -> int:
        # sqrt(D) 为无理数，(s + sqrt(D)) / t 永不为整数
        if t > 0:
            return (s + self._root) // t
        return (s + self._root + 1) // t

    def _detect_period(self) -> None:
        D = self.surd.D
        s, t = self.surd.P, self.surd.Q
        seen: dict[tuple[int, int], int] = {}
        k = 0
        while (s, t) not in seen:
            seen[(s, t)] = k
            a = self._floor_quotient(s, t)
            self._s.append(s)
            self._t.append(t)
            self._a.append(a)
            s = a * t - s
            t, rem = divmod(D - s * s, t)
            if rem:
                raise ArithmeticError(f"t_{k + 1} is not exact for {self.surd}")
            k += 1
        self.preperiod_length = seen[(s, t)]
        self.period_length = k - self.preperiod_length
        logger.debug(
            f"Expanded {self.surd}: preperiod={self.preperiod_length} period={self.period_length}"
        )

    def _index(self, k: int) -> int:
        if k < 0:
            raise IndexError(f"index must be >= 0, got {k}")
        if k < len(self._a):
            return k
        return self.preperiod_length + (k - self.preperiod_length) % self.period_length

    def quotient(self, k: int) -> int:
        return self._a[self._index(k)]

    def s(self, k: int) -> int:
        return self._s[self._index(k)]

    def t(self, k: int) -> int:
        return self._t[self._index(k)]

    def terms(self, n: int) -> list[int]:
        """前 n 个部分商"""
        return [self.quotient(k) for k in range(n)]

    @property
    def period_quotients(self) -> list[int]:
        start = self.preperiod_length
        return self._a[start : start + self.period_length]

    def convergent(self, k: int) -> tuple[int, int]:
        """(p_k, q_k)，k >= -2"""
        if k < -2:
            raise IndexError(f"convergent index must be >= -2, got {k}")
        with self._lock:
            while len(self._p) < k + 3:
                j = len(self._p) - 2
                a = self.quotient(j)
                self._p.append(a * self._p[-1] + self._p[-2])
                self._q.append(a * self._q[-1] + self._q[-2])
            return self._p[k + 2], self._q[k + 2]

    def convergents(self, n: int) -> list[tuple[int, int]]:
        """前 n 个渐近分数 (p_0, q_0) ... (p_{n-1}, q_{n-1})"""
        return [self.convergent(k) for k in range(n)]

    def g(self, k: int) -> int:
        """G_k = Q0*p_k - P0*q_k，满足 G_{k-1}^2 - D*q_{k-1}^2 = (-1)^k * t_k * Q0"""
        p, q = self.convergent(k)
        return self.surd.Q * p - self.surd.P * q


def expand_surd(surd: QuadraticSurd) -> SurdExpansion:
    """任意（已规范化）二次根式的展开"""
    return SurdExpansion(surd)


@lru_cache(maxsize=1024)
def expand(A: int, B: int) -> SurdExpansion:
    """
    展开 sqrt(A/B)

    Args:
        A: 正整数
        B: 正整数

    Returns:
        SurdExpansion，s_0 = 0，t_0 = B

    Raises:
        PerfectSquareError: A*B 为完全平方数（值为有理数）
    """
    if A < 1 or B < 1:
        raise ValueError(f"A and B must be positive, got {A}, {B}")
    return SurdExpansion(QuadraticSurd.sqrt_ratio(A, B))


def convergent(expansion: SurdExpansion, k: int) -> tuple[int, int]:
    """第 k 个渐近分数 (p_k, q_k)，k = -1 时为 (1, 0)"""
    if k < -1:
        raise IndexError(f"convergent index must be >= -1, got {k}")
    return expansion.convergent(k)


def lemma_value(expansion: SurdExpansion, k: int, r: int, u: int) -> int:
    """(-1)^k * (u^2 t_{k+1} + 2ru s_{k+2} - r^2 t_{k+2})"""
    sign = -1 if k % 2 else 1
    return sign * (
        u * u * expansion.t(k + 1)
        + 2 * r * u * expansion.s(k + 2)
        - r * r * expansion.t(k + 2)
    )
