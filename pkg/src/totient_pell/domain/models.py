"""领域模型"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from sympy import isprime

from totient_pell.domain.errors import InvalidFactorizationError, PerfectSquareError

# sympy.isprime 在 2^64 以下是确定性的
PRIMALITY_LIMIT = 2**64


@dataclass(frozen=True)
class FactoredInteger:
    """完全分解形式的正整数，空列表表示 1"""

    factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        previous = 1
        for prime, exponent in self.factors:
            if prime <= previous:
                raise InvalidFactorizationError(
                    f"primes must be strictly ascending: {prime} after {previous}"
                )
            if prime >= PRIMALITY_LIMIT:
                raise InvalidFactorizationError(
                    f"prime {prime} exceeds the deterministic primality range"
                )
            if not isprime(prime):
                raise InvalidFactorizationError(f"{prime} is not prime")
            if exponent < 1:
                raise InvalidFactorizationError(f"exponent of {prime} must be >= 1")
            previous = prime

    @classmethod
    def from_exponents(cls, exponents: dict[int, int]) -> FactoredInteger:
        """由 {素数: 指数} 构造，指数为 0 的项被忽略"""
        return cls(tuple(sorted((p, e) for p, e in exponents.items() if e > 0)))

    def value(self) -> int:
        result = 1
        for prime, exponent in self.factors:
            result *= prime**exponent
        return result

    def exponent_of(self, prime: int) -> int:
        for p, e in self.factors:
            if p == prime:
                return e
        return 0

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return "*".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors)


@dataclass(frozen=True)
class ResidueClass:
    """同余类 residue (mod modulus)"""

    residue: int
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError(f"modulus must be positive, got {self.modulus}")
        if not 0 <= self.residue < self.modulus:
            raise ValueError(f"residue {self.residue} out of range mod {self.modulus}")

    @classmethod
    def of(cls, value: int, modulus: int) -> ResidueClass:
        """约化任意整数"""
        if modulus < 1:
            raise ValueError(f"modulus must be positive, got {modulus}")
        return cls(value % modulus, modulus)

    def contains(self, value: int) -> bool:
        return value % self.modulus == self.residue

    def __str__(self) -> str:
        return f"{self.residue} mod {self.modulus}"


@dataclass(frozen=True)
class QuadraticSurd:
    """二次根式 (P + sqrt(D)) / Q"""

    P: int
    Q: int
    D: int

    def __post_init__(self) -> None:
        if self.D <= 0:
            raise ValueError(f"D must be positive, got {self.D}")
        if self.Q == 0:
            raise ValueError("Q must be nonzero")
        root = math.isqrt(self.D)
        if root * root == self.D:
            raise PerfectSquareError(f"D={self.D} is a perfect square")
        if (self.D - self.P * self.P) % self.Q != 0:
            raise ValueError("Q must divide D - P^2; use QuadraticSurd.normalized")

    @classmethod
    def normalized(cls, P: int, Q: int, D: int) -> QuadraticSurd:
        """若 Q 不整除 D - P^2，则同乘 |Q| 使其整除"""
        if Q != 0 and (D - P * P) % Q != 0:
            scale = abs(Q)
            return cls(P * scale, Q * scale, D * scale * scale)
        return cls(P, Q, D)

    @classmethod
    def sqrt_ratio(cls, A: int, B: int) -> QuadraticSurd:
        """sqrt(A/B) = (0 + sqrt(A*B)) / B"""
        return cls(0, B, A * B)


class Variable(str, Enum):
    """Pell 方程中的未知量"""

    X = "X"
    Y = "Y"


@dataclass(frozen=True)
class Constraint:
    """对 X 或 Y 的同余约束"""

    variable: Variable
    residue_class: ResidueClass

    def __str__(self) -> str:
        return f"{self.variable.value} = {self.residue_class}"


@dataclass(frozen=True)
class PellInstance:
    """A*Y^2 - B*X^2 = N 以及同余约束"""

    A: int
    B: int
    N: int
    constraints: tuple[Constraint, ...] = ()

    def __post_init__(self) -> None:
        if self.A < 1 or self.B < 1:
            raise ValueError("A and B must be positive")
        if self.N == 0:
            raise ValueError("N must be nonzero")
        product = self.A * self.B
        root = math.isqrt(product)
        if root * root == product:
            raise PerfectSquareError(f"A*B={product} is a perfect square")

    @property
    def D(self) -> int:
        return self.A * self.B

    @property
    def M(self) -> int:
        return self.A * self.N

    def classes_for(self, variable: Variable) -> tuple[ResidueClass, ...]:
        return tuple(c.residue_class for c in self.constraints if c.variable == variable)

    def unconstrained(self) -> PellInstance:
        return PellInstance(self.A, self.B, self.N)

    def satisfied_by(self, X: int, Y: int) -> bool:
        """直接代入检查方程与全部约束"""
        if self.A * Y * Y - self.B * X * X != self.N:
            return False
        values = {Variable.X: X, Variable.Y: Y}
        return all(c.residue_class.contains(values[c.variable]) for c in self.constraints)

    def __str__(self) -> str:
        text = f"{self.A}*Y^2 - {self.B}*X^2 = {self.N}"
        if self.constraints:
            text += " with " + ", ".join(str(c) for c in self.constraints)
        return text


@dataclass(frozen=True)
class SolutionClass:
    """u^2 - D*v^2 = M 的一个类的基本解（|v| 最小，v >= 0）"""

    u: int
    v: int
    v_bounds: tuple[int, int]


class Verdict(str, Enum):
    """Pell 判定结果"""

    SAT = "SAT"
    UNSAT = "UNSAT"


@dataclass(frozen=True)
class OrbitComponent:
    """单位作用在某个素数幂模下的周期与可行指数"""

    modulus: int
    period: int
    admissible: tuple[int, ...]


@dataclass(frozen=True)
class OrbitCheck:
    """一个起点（类代表的某种符号组合）的轨道检查"""

    start: tuple[int, int]
    components: tuple[OrbitComponent, ...]
    combined_period: int
    merged: tuple[int, ...]


@dataclass(frozen=True)
class PellCertificate:
    """UNSAT 证书：基本单位、类代表与逐个起点耗尽的轨道"""

    unit: tuple[int, int]
    representatives: tuple[SolutionClass, ...]
    excluded: tuple[SolutionClass, ...]
    modulus: int
    checks: tuple[OrbitCheck, ...]
    checked_points: int


@dataclass(frozen=True)
class PellDecision:
    """SAT 带见证 (X, Y)，UNSAT 带证书"""

    verdict: Verdict
    witness: tuple[int, int] | None = None
    certificate: PellCertificate | None = None


@dataclass(frozen=True)
class CandidateTriple:
    """Worley 界内的 (k, d, r, u)"""

    k: int
    d: int
    r: int
    u: int


@dataclass(frozen=True)
class CandidateC:
    """候选 c 及产生它的全部三元组"""

    c: int
    witnesses: tuple[CandidateTriple, ...]


@dataclass(frozen=True)
class ConstraintBranch:
    """某个 c 的一组合并后的 X/Y 约束"""

    c: int
    x_class: ResidueClass
    y_class: ResidueClass
    constituents: tuple[Constraint, ...]
    refined_by: tuple[tuple[int, int], ...] = ()

    @property
    def label(self) -> str:
        if not self.refined_by:
            return "base"
        return ",".join(f"Y={r} mod {q}" for q, r in self.refined_by)


@dataclass(frozen=True)
class RuZeroCase:
    """ru = 0 特例产生的整数 c"""

    family: str
    d: int
    coordinate: int
    c: int


@dataclass(frozen=True)
class AxisBranch:
    """X = 0 或 Y = 0 时右端 numerator/denominator 的检查"""

    numerator: int
    denominator: int
    defined: bool
    integral: bool
    value: int | None
    square: bool
    roots: tuple[int, ...] = ()


@dataclass(frozen=True)
class AxisReport:
    """坐标轴上的退化解"""

    c: int
    x_zero: AxisBranch
    y_zero: AxisBranch


@dataclass(frozen=True)
class BackSubstitution:
    """由 (X, Y) 反解 (x, y) 的结果"""

    c: int
    X: int
    Y: int
    x: int | None
    y: int | None
    alpha: int | None
    beta: int | None
    n: int | None
    genuine: bool


@dataclass(frozen=True)
class PellRecord:
    """证明流水线中的一次 Pell 判定"""

    c: int
    branch: ConstraintBranch
    instance: PellInstance
    decision: PellDecision
    final: bool
    back_substitution: BackSubstitution | None = None


@dataclass(frozen=True)
class ConstantCheck:
    """推导出的常数与预期常数的比对"""

    name: str
    derived: int
    expected: int

    @property
    def agrees(self) -> bool:
        return self.derived == self.expected


@dataclass(frozen=True)
class ParityChain:
    """
    α、β 为偶数且 M、N 互素这一推导链中可直接计算的部分

    M = 2^(α+1) - 1，N = (5^(β+1) - 1)/4，E = 2^(2α+1)·5^(2β-1) - 2。
    """

    exponent_limit: int
    squares_divisible: bool
    order_2_mod_499: int
    no_499_up_to: int
    no_499_in_m: bool
    odd_alpha_excluded: bool
    odd_beta_excluded: bool

    @property
    def holds(self) -> bool:
        return (
            self.squares_divisible
            and self.order_2_mod_499 % 2 == 0
            and self.no_499_in_m
            and self.odd_alpha_excluded
            and self.odd_beta_excluded
        )


@dataclass(frozen=True)
class CResidueDerivation:
    """c 模 2、3、5 的推导，parity_chain 记录 α、β 取偶数的依据"""

    parity: ResidueClass
    mod3: ResidueClass
    mod5_branches: dict[int, ResidueClass]
    excluded_alpha_class: int
    jacobi_checked_up_to: int
    selected_mod5: ResidueClass
    parity_chain: ParityChain | None = None


class ProofVerdict(str, Enum):
    """定理判定"""

    VERIFIED = "VERIFIED"
    COUNTEREXAMPLE = "COUNTEREXAMPLE"
    INCOMPLETE = "INCOMPLETE"


@dataclass(frozen=True)
class TheoremVerdict:
    kind: ProofVerdict
    scope: str
    counterexample: int | None = None
    reason: str | None = None


@dataclass(frozen=True)
class ProofReport:
    """完整的证明记录"""

    alpha_max: int
    beta_max: int
    scan_result: tuple[int, ...]
    base_case_alpha: tuple[int, ...]
    base_case_beta: tuple[int, ...]
    constants: tuple[ConstantCheck, ...]
    c_derivation: CResidueDerivation | None
    c_class: ResidueClass | None
    xy_classes: tuple[ResidueClass, ResidueClass] | None
    candidates_per_k: dict[int, tuple[CandidateC, ...]]
    ru_zero: tuple[RuZeroCase, ...]
    axis_results: tuple[AxisReport, ...]
    pell_decisions: tuple[PellRecord, ...]
    unconstrained: dict[int, Verdict]
    verdict: TheoremVerdict
    settings: dict[str, int | bool] = field(default_factory=dict)
