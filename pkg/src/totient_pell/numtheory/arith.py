"""整数工具与乘性数论：phi、sigma、目标同余、Jacobi、CRT、乘法阶、幂剩余集"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence

from sympy import isprime

from totient_pell.domain.errors import (
    EvenModulusError,
    FactorizationError,
    InconsistentResiduesError,
    NonInvertibleError,
)
from totient_pell.domain.models import FactoredInteger, ResidueClass

# 平方数模 64 / 63 / 65 的剩余，用于快速排除
_SQUARES_MOD_64 = frozenset(i * i % 64 for i in range(64))
_SQUARES_MOD_63 = frozenset(i * i % 63 for i in range(63))
_SQUARES_MOD_65 = frozenset(i * i % 65 for i in range(65))


def isqrt(n: int) -> int:
    """精确整数平方根 floor(sqrt(n))"""
    if n < 0:
        raise ValueError(f"isqrt of negative number {n}")
    return math.isqrt(n)


def is_square(n: int) -> bool:
    """精确完全平方判定"""
    if n < 0:
        return False
    if n & 63 not in _SQUARES_MOD_64:
        return False
    if n % 63 not in _SQUARES_MOD_63 or n % 65 not in _SQUARES_MOD_65:
        return False
    root = math.isqrt(n)
    return root * root == n


def modpow(base: int, exp: int, m: int) -> int:
    """base^exp mod m（exp >= 0）"""
    return pow(base, exp, m)


def euler_phi(n: FactoredInteger) -> int:
    """
    欧拉函数

    Args:
        n: 分解形式的正整数

    Returns:
        prod p^(e-1) * (p-1)，phi(1) = 1
    """
    result = 1
    for p, e in n.factors:
        result *= p ** (e - 1) * (p - 1)
    return result


def sigma(n: FactoredInteger) -> int:
    """
    因子和函数

    Args:
        n: 分解形式的正整数

    Returns:
        prod (p^(e+1) - 1) / (p - 1)，sigma(1) = 1
    """
    result = 1
    for p, e in n.factors:
        result *= (p ** (e + 1) - 1) // (p - 1)
    return result


def check_congruence(n: FactoredInteger) -> bool:
    """n*phi(n) = 2 (mod sigma(n))，按有符号整数整除判断，n = 1 无需特判"""
    return (n.value() * euler_phi(n) - 2) % sigma(n) == 0


def jacobi(a: int, m: int) -> int:
    """
    Jacobi 符号 (a/m)

    Args:
        a: 任意整数
        m: 奇正整数

    Returns:
        -1、0 或 1；m 为素数时即 Legendre 符号

    Raises:
        EvenModulusError: m 为偶数或非正
    """
    if m < 1 or m % 2 == 0:
        raise EvenModulusError(f"Jacobi symbol needs an odd positive modulus, got {m}")
    acc = 1
    a %= m
    while a:
        while a % 2 == 0:
            a //= 2
            if m % 8 in (3, 5):
                acc = -acc
        a, m = m, a
        if a % 4 == 3 and m % 4 == 3:
            acc = -acc
        a %= m
    return acc if m == 1 else 0


def crt(classes: Iterable[ResidueClass]) -> ResidueClass:
    """
    中国剩余定理（允许模数不互素，按 lcm 合并）

    Args:
        classes: 同余类列表

    Returns:
        模 lcm 的唯一同余类；空输入返回 0 mod 1

    Raises:
        InconsistentResiduesError: 同余类互相矛盾
    """
    residue, modulus = 0, 1
    for cls in classes:
        g = math.gcd(modulus, cls.modulus)
        if (cls.residue - residue) % g != 0:
            raise InconsistentResiduesError(
                f"{cls} is inconsistent with {residue} mod {modulus}"
            )
        # residue + modulus * t = cls.residue (mod cls.modulus)
        step = cls.modulus // g
        t = ((cls.residue - residue) // g) * pow(modulus // g, -1, step) % step if step > 1 else 0
        residue += modulus * t
        modulus = modulus * step
        residue %= modulus
    return ResidueClass(residue, modulus)


def multiplicative_order(g: int, m: int) -> int:
    """
    乘法阶：最小 k >= 1 使 g^k = 1 (mod m)

    Raises:
        NonInvertibleError: gcd(g, m) != 1
    """
    if m < 1:
        raise ValueError(f"modulus must be positive, got {m}")
    if math.gcd(g, m) != 1:
        raise NonInvertibleError(f"gcd({g}, {m}) != 1")
    if m == 1:
        return 1
    value = g % m
    k = 1
    while value != 1:
        value = value * g % m
        k += 1
    return k


def power_residue_set(
    g: int, m: int, multiplier: int, exponent_class: ResidueClass
) -> frozenset[int]:
    """
    {multiplier * g^e mod m : e = exponent_class}，取 g 模 m 的一个完整周期

    Raises:
        NonInvertibleError: gcd(g, m) != 1
    """
    order = multiplicative_order(g, m)
    span = order * exponent_class.modulus // math.gcd(order, exponent_class.modulus)
    return frozenset(
        multiplier * pow(g, e, m) % m
        for e in range(exponent_class.residue, span, exponent_class.modulus)
    )


def factor_over(n: int, primes: Sequence[int]) -> FactoredInteger | None:
    """在给定素数集上分解 n，若含其它素因子返回 None"""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    exponents: dict[int, int] = {}
    for p in sorted(primes):
        while n % p == 0:
            n //= p
            exponents[p] = exponents.get(p, 0) + 1
    if n != 1:
        return None
    return FactoredInteger.from_exponents(exponents)


def trial_factor(n: int, limit: int = 10**6) -> FactoredInteger:
    """
    试除法分解（除数不超过 limit），剩余余因子必须为 1 或素数

    Raises:
        FactorizationError: 余因子为合数
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    exponents: dict[int, int] = {}
    p = 2
    while p <= limit and p * p <= n:
        while n % p == 0:
            n //= p
            exponents[p] = exponents.get(p, 0) + 1
        p += 1 if p == 2 else 2
    if n > 1:
        if not isprime(n):
            raise FactorizationError(f"cofactor {n} has no factor <= {limit} and is not prime")
        exponents[n] = exponents.get(n, 0) + 1
    return FactoredInteger.from_exponents(exponents)
