"""证明服务 - 编排穷举扫描、基础情形、c 的同余推导、候选枚举与 Pell 判定"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from functools import partial

from totient_pell.adapters.executor import ParallelExecutor
from totient_pell.adapters.observability.context import run_scope
from totient_pell.adapters.observability.tracing import stage
from totient_pell.config import Config
from totient_pell.domain.errors import PellResourceExceeded
from totient_pell.domain.models import (
    BackSubstitution,
    CandidateC,
    ConstantCheck,
    ConstraintBranch,
    CResidueDerivation,
    FactoredInteger,
    ParityChain,
    PellDecision,
    PellInstance,
    PellRecord,
    ProofReport,
    ProofVerdict,
    ResidueClass,
    TheoremVerdict,
    Verdict,
)
from totient_pell.numtheory.arith import (
    check_congruence,
    crt,
    factor_over,
    jacobi,
    multiplicative_order,
)
from totient_pell.numtheory.pell import decide
from totient_pell.numtheory.search import (
    C_CLASS,
    axis_solutions,
    base_branch,
    derive_xy_classes,
    enumerate_candidates,
    pell_instance,
    refine,
    refinement_primes,
    ru_zero_cases,
)

logger = logging.getLogger(__name__)

KNOWN_SOLUTIONS = (1, 2, 5, 8)

# 预期常数：2^α 情形 D | 15，5^β 情形 D | 246
ALPHA_CONSTANT = 15
BETA_CONSTANT = 246

K_RANGE = range(6)

# 模 5 分支由 α mod 4 决定；Jacobi 检查的 α 上界
JACOBI_ALPHA_LIMIT = 400

# 奇偶性推导链中逐项检查的指数范围
PARITY_EXPONENT_LIMIT = 50
NO_499_LIMIT = 332

# 2、5 的幂模 8 / 3 / 5 的周期都整除 4，取这么多个偶指数即构成完全剩余系
_EXPONENT_SAMPLES = 8


def brute_scan(alpha_max: int, beta_max: int) -> tuple[FactoredInteger, ...]:
    """
    穷举 n = 2^α 5^β（0 <= α <= alpha_max，0 <= β <= beta_max）中满足同余的 n

    Returns:
        按数值排序的分解形式
    """
    if alpha_max < 0 or beta_max < 0:
        raise ValueError("scan bounds must be nonnegative")
    found = []
    for alpha in range(alpha_max + 1):
        for beta in range(beta_max + 1):
            n = FactoredInteger.from_exponents({2: alpha, 5: beta})
            if check_congruence(n):
                found.append(n)
    return tuple(sorted(found, key=lambda n: n.value()))


def reduced_constant(p: int) -> int:
    """
    n = p^e 时 n*phi(n) = (p-1) p^(2e-1) = 2 (mod sigma)；两边乘 p^3 并用
    p^(e+1) = 1 (mod sigma) 得 sigma | 2p^3 - (p-1)
    """
    return 2 * p**3 - (p - 1)


def base_constants() -> tuple[ConstantCheck, ...]:
    """独立推导的常数与预期常数比对，不一致只记录不修正"""
    checks = (
        ConstantCheck("alpha", reduced_constant(2), ALPHA_CONSTANT),
        ConstantCheck("beta", reduced_constant(5), BETA_CONSTANT),
    )
    for check in checks:
        if not check.agrees:
            logger.warning(
                f"Derived constant {check.derived} for {check.name} differs from {check.expected}"
            )
    return checks


def base_case_alpha(constant: int = ALPHA_CONSTANT) -> tuple[int, ...]:
    """{α >= 2 : (2^(α+1) - 1) | constant}；除数超过 constant 后不可能再整除"""
    found = []
    alpha = 2
    while (divisor := 2 ** (alpha + 1) - 1) <= constant:
        if constant % divisor == 0:
            found.append(alpha)
        alpha += 1
    return tuple(found)


def base_case_beta(constant: int = BETA_CONSTANT) -> tuple[int, ...]:
    """{β >= 2 : (5^(β+1) - 1)/4 | constant}；除数超过 constant 后不可能再整除"""
    found = []
    beta = 2
    while (divisor := (5 ** (beta + 1) - 1) // 4) <= constant:
        if constant % divisor == 0:
            found.append(beta)
        beta += 1
    return tuple(found)


def _c_solutions(modulus: int, xs: set[int], ys: set[int]) -> set[int]:
    """x^2 + y^2 - 501 = c(x-1)(y-1) (mod modulus) 对全部 x、y 成立的 c"""
    return {
        c
        for c in range(modulus)
        if all(
            (x * x + y * y - 501 - c * (x - 1) * (y - 1)) % modulus == 0 for x in xs for y in ys
        )
    }


def _as_class(solutions: set[int], modulus: int, target: int) -> ResidueClass:
    """把模 modulus 的解集写成模 target 的单个剩余类"""
    reduced = {c % target for c in solutions}
    lifted = {c for c in range(modulus) if c % target in reduced}
    if len(reduced) != 1 or lifted != solutions:
        raise ArithmeticError(
            f"solutions {sorted(solutions)} mod {modulus} are not one class mod {target}"
        )
    return ResidueClass(reduced.pop(), target)


def _powers(base: int, exponents: range, modulus: int) -> set[int]:
    return {pow(base, e + 1, modulus) for e in exponents}


def _m_of(alpha: int) -> int:
    return 2 ** (alpha + 1) - 1


def _n_of(beta: int) -> int:
    return (5 ** (beta + 1) - 1) // 4


def _e_mod(alpha: int, beta: int, modulus: int) -> int:
    """E = 2^(2α+1)·5^(2β-1) - 2 模 modulus"""
    return (pow(2, 2 * alpha + 1, modulus) * pow(5, 2 * beta - 1, modulus) - 2) % modulus


def parity_chain(
    limit: int = PARITY_EXPONENT_LIMIT, no_499_limit: int = NO_499_LIMIT
) -> ParityChain:
    """
    检查 α、β 为偶数这一推导中可直接计算的部分

    - M | 2^(2(α+1)) - 1，N | 5^(2(β+1)) - 1（α, β <= limit），结合同余式得 gcd(M, N) | 499
    - 2 模 499 的阶为 166（偶数），偶数 α 时 499 不整除 M（α <= no_499_limit）
    - α 为奇数时 3 | M 但 3 不整除 E
    - β 为奇数时 6 | N 但 6 不整除 E

    Args:
        limit: α、β 的检查上界
        no_499_limit: 499 不整除 M 的偶数 α 上界

    Returns:
        ParityChain: 各项检查结果
    """
    exponents = range(limit + 1)
    squares = all((2 ** (2 * (a + 1)) - 1) % _m_of(a) == 0 for a in exponents) and all(
        (5 ** (2 * (b + 1)) - 1) % _n_of(b) == 0 for b in exponents
    )
    no_499 = all(_m_of(a) % 499 != 0 for a in range(0, no_499_limit + 1, 2))
    positive = range(1, limit + 1)
    odd_alpha = all(
        _m_of(a) % 3 == 0 and _e_mod(a, b, 3) != 0 for a in range(1, limit + 1, 2) for b in positive
    )
    odd_beta = all(
        _n_of(b) % 6 == 0 and _e_mod(a, b, 6) != 0 for b in range(1, limit + 1, 2) for a in positive
    )
    chain = ParityChain(
        exponent_limit=limit,
        squares_divisible=squares,
        order_2_mod_499=multiplicative_order(2, 499),
        no_499_up_to=no_499_limit,
        no_499_in_m=no_499,
        odd_alpha_excluded=odd_alpha,
        odd_beta_excluded=odd_beta,
    )
    if not chain.holds:
        logger.warning(f"Parity chain check failed: {chain}")
    return chain


def c_residue_branches() -> CResidueDerivation:
    """
    在完全剩余系上推导 c 模 2、3、5

    α、β 为偶数（>= 2），x = 2^(α+1)，y = 5^(β+1)。模 5 时按 α mod 4 分支，
    α = 2 (mod 4) 由 Jacobi 符号 (5 / 2^(α+1) - 1) = -1 排除。
    """
    even = range(2, 2 + 2 * _EXPONENT_SAMPLES, 2)
    parity = _as_class(_c_solutions(8, _powers(2, even, 8), _powers(5, even, 8)), 8, 2)
    mod3 = _as_class(_c_solutions(3, _powers(2, even, 3), _powers(5, even, 3)), 3, 3)

    ys5 = _powers(5, even, 5)
    mod5_branches: dict[int, ResidueClass] = {}
    for alpha_class in (0, 2):
        alphas = range(4 + alpha_class, 4 + alpha_class + 4 * _EXPONENT_SAMPLES, 4)
        solutions = _c_solutions(5, _powers(2, alphas, 5), ys5)
        mod5_branches[alpha_class] = _as_class(solutions, 5, 5)

    excluded = 2
    for alpha in range(excluded, JACOBI_ALPHA_LIMIT + 1, 4):
        if jacobi(5, 2 ** (alpha + 1) - 1) != -1:
            raise ArithmeticError(f"Jacobi exclusion fails at alpha={alpha}")

    return CResidueDerivation(
        parity=parity,
        mod3=mod3,
        mod5_branches=mod5_branches,
        excluded_alpha_class=excluded,
        jacobi_checked_up_to=JACOBI_ALPHA_LIMIT,
        selected_mod5=mod5_branches[0],
        parity_chain=parity_chain(),
    )


def derive_c_congruence(derivation: CResidueDerivation | None = None) -> ResidueClass:
    """c 模 2、3、5 的三个类用 CRT 合并，结果为 17 mod 30"""
    derivation = derivation or c_residue_branches()
    return crt([derivation.parity, derivation.mod3, derivation.selected_mod5])


def back_substitute(c: int, X: int, Y: int) -> BackSubstitution:
    """
    由 X = cy - c - 2x、Y = cy - c - 2y 反解 x、y，检查 x = 2^(α+1)、y = 5^(β+1)
    （α, β >= 1）与同余
    """
    y, y_rem = divmod(Y + c, c - 2)
    x, x_rem = divmod(c * y - c - X, 2)
    if y_rem or x_rem:
        return BackSubstitution(c, X, Y, None, None, None, None, None, False)
    shape = factor_over(x, (2,)) if x >= 4 else None
    y_shape = factor_over(y, (5,)) if y >= 25 else None
    if shape is None or y_shape is None:
        return BackSubstitution(c, X, Y, x, y, None, None, None, False)
    alpha = shape.exponent_of(2) - 1
    beta = y_shape.exponent_of(5) - 1
    n = FactoredInteger.from_exponents({2: alpha, 5: beta})
    return BackSubstitution(c, X, Y, x, y, alpha, beta, n.value(), check_congruence(n))


def diagonalization_residual(c: int, x: int, y: int) -> int:
    """
    (c+2)Y^2 - (c-2)X^2 + 1996c - 4008 + 4(c-2)(x^2 + y^2 - 501 - c(x-1)(y-1))，恒为 0
    """
    X = c * y - c - 2 * x
    Y = c * y - c - 2 * y
    lhs = (c + 2) * Y * Y - (c - 2) * X * X + 1996 * c - 4008
    return lhs + 4 * (c - 2) * (x * x + y * y - 501 - c * (x - 1) * (y - 1))


def _decide_instance(step_cap: int, inst: PellInstance) -> PellDecision | PellResourceExceeded:
    """进程池中执行的判定；资源超限作为结果返回，由调用方标记 INCOMPLETE"""
    try:
        return decide(inst, step_cap)
    except PellResourceExceeded as e:
        return e


def _expected_scan(alpha_max: int, beta_max: int) -> set[int]:
    """范围内应当出现的已知解"""
    expected: set[int] = set()
    for n in KNOWN_SOLUTIONS:
        factored = factor_over(n, (2, 5))
        if factored is None:
            continue
        if factored.exponent_of(2) <= alpha_max and factored.exponent_of(5) <= beta_max:
            expected.add(n)
    return expected


class ProofService:
    """定理验证（用例编排）"""

    def __init__(self, config: Config, executor: ParallelExecutor):
        """
        初始化证明服务

        Args:
            config: 配置对象（注入）
            executor: 并行执行器（注入）
        """
        self.config = config
        self.executor = executor

    def prove_theorem(self) -> ProofReport:
        """
        运行完整的验证流水线，整个运行共用一个 run_id

        Returns:
            ProofReport: 全部中间结果与最终判定
        """
        with run_scope() as run_id:
            return self._run(run_id)

    def _run(self, run_id: str) -> ProofReport:
        config = self.config
        logger.info(
            f"Proof run started (alpha_max={config.alpha_max}, beta_max={config.beta_max})",
            extra={"run_id": run_id},
        )

        with stage("scan") as out:
            scan = brute_scan(config.alpha_max, config.beta_max)
            out["solutions"] = [n.value() for n in scan]
        scan_values = tuple(n.value() for n in scan)
        extra_solutions = sorted(set(scan_values) - set(KNOWN_SOLUTIONS))
        missing = _expected_scan(config.alpha_max, config.beta_max) - set(scan_values)

        if config.scan_only:
            verdict = self._scan_verdict(extra_solutions, missing)
            return ProofReport(
                alpha_max=config.alpha_max,
                beta_max=config.beta_max,
                scan_result=scan_values,
                base_case_alpha=(),
                base_case_beta=(),
                constants=(),
                c_derivation=None,
                c_class=None,
                xy_classes=None,
                candidates_per_k={},
                ru_zero=(),
                axis_results=(),
                pell_decisions=(),
                unconstrained={},
                verdict=verdict,
                settings=config.report_settings(),
            )

        with stage("base_cases") as out:
            constants = base_constants()
            alpha_cases = base_case_alpha()
            beta_cases = base_case_beta()
            out["alpha"], out["beta"] = list(alpha_cases), list(beta_cases)

        with stage("c_congruence") as out:
            derivation = c_residue_branches()
            c_class = derive_c_congruence(derivation)
            out["c_class"] = str(c_class)

        with stage("xy_classes"):
            xy_classes = derive_xy_classes()

        candidates_per_k: dict[int, tuple[CandidateC, ...]] = {}
        for k in K_RANGE:
            with stage("candidates", k=k) as out:
                candidates_per_k[k] = enumerate_candidates(k, executor=self.executor)
                out["c"] = [cand.c for cand in candidates_per_k[k]]

        with stage("ru_zero") as out:
            ru_zero = ru_zero_cases()
            out["c"] = sorted({case.c for case in ru_zero})

        surviving = sorted({cand.c for cands in candidates_per_k.values() for cand in cands})

        with stage("axis"):
            axis_results = tuple(axis_solutions(c) for c in surviving)

        with stage("pell") as out:
            records, reasons, counterexample = self._decide_all(surviving)
            out["decisions"] = len(records)

        with stage("unconstrained"):
            unconstrained = self._unconstrained(surviving)

        reasons = list(reasons)
        if not all(check.agrees for check in constants):
            reasons.append("derived base constants differ from the expected ones")
        if alpha_cases != (3,) or beta_cases != ():
            reasons.append(f"base cases alpha={alpha_cases} beta={beta_cases}")
        if derivation.parity_chain is not None and not derivation.parity_chain.holds:
            reasons.append("parity chain for alpha and beta does not hold")
        if c_class != C_CLASS:
            reasons.append(f"derived c class {c_class} differs from {C_CLASS}")
        if candidates_per_k.get(5):
            reasons.append(f"k=5 produced candidates {[c.c for c in candidates_per_k[5]]}")
        stray = sorted({case.c for case in ru_zero if C_CLASS.contains(case.c)})
        if stray:
            reasons.append(f"ru=0 cases produce c={stray}")
        on_axis = [a.c for a in axis_results if a.x_zero.square or a.y_zero.square]
        if on_axis:
            reasons.append(f"axis solutions at c={on_axis}")

        verdict = self._full_verdict(extra_solutions, missing, counterexample, reasons)
        logger.info(f"Proof run finished: {verdict.kind.value}", extra={"run_id": run_id})
        return ProofReport(
            alpha_max=config.alpha_max,
            beta_max=config.beta_max,
            scan_result=scan_values,
            base_case_alpha=alpha_cases,
            base_case_beta=beta_cases,
            constants=constants,
            c_derivation=derivation,
            c_class=c_class,
            xy_classes=xy_classes,
            candidates_per_k=candidates_per_k,
            ru_zero=ru_zero,
            axis_results=axis_results,
            pell_decisions=records,
            unconstrained=unconstrained,
            verdict=verdict,
            settings=config.report_settings(),
        )

    def _decide_all(
        self, surviving: Sequence[int]
    ) -> tuple[tuple[PellRecord, ...], list[str], int | None]:
        """先判定基本分支；见证为伪解的 SAT 分支按下一个素因子细分"""
        step_cap = self.config.pell_step_cap
        pending: list[tuple[ConstraintBranch, tuple[int, ...]]] = [
            (base_branch(c), refinement_primes(c)) for c in surviving
        ]
        records: list[PellRecord] = []
        reasons: list[str] = []
        counterexample: int | None = None

        while pending:
            instances = [pell_instance(branch) for branch, _ in pending]
            results = self.executor.map(partial(_decide_instance, step_cap), instances)
            next_pending: list[tuple[ConstraintBranch, tuple[int, ...]]] = []
            for (branch, primes), inst, result in zip(pending, instances, results):
                fields = {"c": branch.c, "branch": branch.label}
                if isinstance(result, PellResourceExceeded):
                    logger.warning(f"Pell decision incomplete: {result}", extra=fields)
                    reasons.append(f"c={branch.c} branch {branch.label}: {result}")
                    continue
                if result.verdict is Verdict.UNSAT:
                    records.append(PellRecord(branch.c, branch, inst, result, final=True))
                    continue

                X, Y = result.witness or (0, 0)
                back = back_substitute(branch.c, X, Y)
                if back.genuine:
                    logger.warning(f"Genuine counterexample n={back.n}", extra=fields)
                    records.append(PellRecord(branch.c, branch, inst, result, True, back))
                    if counterexample is None or (back.n or 0) < counterexample:
                        counterexample = back.n
                elif primes:
                    logger.info(
                        f"Spurious witness (X={X}, Y={Y}), refining by {primes[0]}", extra=fields
                    )
                    records.append(PellRecord(branch.c, branch, inst, result, False, back))
                    next_pending.extend((child, primes[1:]) for child in refine(branch, primes[0]))
                else:
                    records.append(PellRecord(branch.c, branch, inst, result, True, back))
                    reasons.append(
                        f"c={branch.c} branch {branch.label} is SAT with a spurious witness "
                        "and no refinement prime left"
                    )
            pending = next_pending

        records.sort(key=lambda r: (r.c, r.branch.y_class.modulus, r.branch.y_class.residue))
        return tuple(records), reasons, counterexample

    def _unconstrained(self, surviving: Sequence[int]) -> dict[int, Verdict]:
        """无同余约束时的判定，仅作参考"""
        instances = [pell_instance(base_branch(c)).unconstrained() for c in surviving]
        results = self.executor.map(
            partial(_decide_instance, self.config.pell_step_cap), instances
        )
        verdicts: dict[int, Verdict] = {}
        for c, result in zip(surviving, results):
            if isinstance(result, PellResourceExceeded):
                logger.warning(f"Unconstrained decision skipped: {result}", extra={"c": c})
                continue
            verdicts[c] = result.verdict
        return verdicts

    def _scan_verdict(self, extra: list[int], missing: set[int]) -> TheoremVerdict:
        if extra:
            return TheoremVerdict(ProofVerdict.COUNTEREXAMPLE, "scan", counterexample=extra[0])
        if missing:
            return TheoremVerdict(
                ProofVerdict.INCOMPLETE, "scan", reason=f"known solutions {sorted(missing)} missing"
            )
        return TheoremVerdict(ProofVerdict.VERIFIED, "scan")

    def _full_verdict(
        self,
        extra: list[int],
        missing: set[int],
        counterexample: int | None,
        reasons: list[str],
    ) -> TheoremVerdict:
        if extra:
            return TheoremVerdict(ProofVerdict.COUNTEREXAMPLE, "full", counterexample=extra[0])
        if counterexample is not None:
            return TheoremVerdict(
                ProofVerdict.COUNTEREXAMPLE, "full", counterexample=counterexample
            )
        if missing:
            reasons = [f"known solutions {sorted(missing)} missing", *reasons]
        if reasons:
            return TheoremVerdict(ProofVerdict.INCOMPLETE, "full", reason="; ".join(reasons))
        return TheoremVerdict(ProofVerdict.VERIFIED, "full")


def prove_theorem(config: Config, executor: ParallelExecutor | None = None) -> ProofReport:
    """按配置运行一次完整验证"""
    own_executor = executor is None
    executor = executor or ParallelExecutor(1)
    try:
        return ProofService(config, executor).prove_theorem()
    finally:
        if own_executor:
            executor.shutdown()
