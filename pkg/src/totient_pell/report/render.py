"""报告组装与文本渲染"""

from importlib.metadata import PackageNotFoundError, version

from totient_pell import __version__
from totient_pell.domain.models import (
    AxisBranch,
    AxisReport,
    BackSubstitution,
    CandidateC,
    Constraint,
    ConstraintBranch,
    OrbitCheck,
    ParityChain,
    PellCertificate,
    PellDecision,
    PellInstance,
    PellRecord,
    ProofReport,
    ResidueClass,
    SolutionClass,
)
from totient_pell.numtheory.cf import SurdExpansion
from totient_pell.report.dto import (
    AxisBranchDTO,
    AxisDTO,
    BackSubstitutionDTO,
    BaseCasesDTO,
    BranchDTO,
    CandidateDTO,
    CertificateDTO,
    ConstantDTO,
    ConstraintDTO,
    DecisionDTO,
    DerivationsDTO,
    EquationDTO,
    OrbitCheckDTO,
    OrbitComponentDTO,
    ParityChainDTO,
    PellRecordDTO,
    PellSectionDTO,
    ProofReportDTO,
    ResidueClassDTO,
    RuZeroDTO,
    ScanDTO,
    SolutionClassDTO,
    TheoremDTO,
)

STATEMENT = "n*phi(n) = 2 (mod sigma(n)) with n = 2^a * 5^b holds exactly for n in {1, 2, 5, 8}"
SCAN_NOTE = (
    "the scan is a bounded check of an infinite claim; the full scope adds the Pell argument"
)


def _versions() -> dict[str, str]:
    versions = {"totient_pell": __version__}
    for package in ("sympy", "pydantic"):
        try:
            versions[package] = version(package)
        except PackageNotFoundError:
            versions[package] = "unknown"
    return versions


def residue_dto(cls: ResidueClass) -> ResidueClassDTO:
    return ResidueClassDTO(residue=cls.residue, modulus=cls.modulus)


def constraint_dto(constraint: Constraint) -> ConstraintDTO:
    return ConstraintDTO(
        variable=constraint.variable.value,
        residue=constraint.residue_class.residue,
        modulus=constraint.residue_class.modulus,
    )


def equation_dto(inst: PellInstance) -> EquationDTO:
    return EquationDTO(A=inst.A, B=inst.B, N=inst.N)


def _solution_class_dto(cls: SolutionClass) -> SolutionClassDTO:
    return SolutionClassDTO(u=cls.u, v=cls.v, v_bounds=list(cls.v_bounds))


def _check_dto(check: OrbitCheck) -> OrbitCheckDTO:
    return OrbitCheckDTO(
        start=list(check.start),
        combined_period=check.combined_period,
        components=[
            OrbitComponentDTO(modulus=c.modulus, period=c.period, admissible=list(c.admissible))
            for c in check.components
        ],
    )


def certificate_dto(cert: PellCertificate) -> CertificateDTO:
    return CertificateDTO(
        unit=list(cert.unit),
        representatives=[_solution_class_dto(c) for c in cert.representatives],
        excluded=[_solution_class_dto(c) for c in cert.excluded],
        modulus=cert.modulus,
        checks=[_check_dto(check) for check in cert.checks],
        checked_points=cert.checked_points,
    )


def decision_dto(inst: PellInstance, decision: PellDecision) -> DecisionDTO:
    return DecisionDTO(
        equation=equation_dto(inst),
        constraints=[constraint_dto(c) for c in inst.constraints],
        verdict=decision.verdict.value,
        witness=list(decision.witness) if decision.witness else None,
        certificate=certificate_dto(decision.certificate) if decision.certificate else None,
    )


def candidate_dto(candidate: CandidateC) -> CandidateDTO:
    return CandidateDTO(
        c=candidate.c,
        witnesses=[[t.k, t.d, t.r, t.u] for t in candidate.witnesses],
    )


def _branch_dto(branch: ConstraintBranch) -> BranchDTO:
    return BranchDTO(
        label=branch.label,
        x_class=residue_dto(branch.x_class),
        y_class=residue_dto(branch.y_class),
        refined_by=[[q, r] for q, r in branch.refined_by],
        constituents=[constraint_dto(c) for c in branch.constituents],
    )


def _back_dto(back: BackSubstitution) -> BackSubstitutionDTO:
    return BackSubstitutionDTO(
        x=back.x, y=back.y, alpha=back.alpha, beta=back.beta, n=back.n, genuine=back.genuine
    )


def _record_dto(record: PellRecord) -> PellRecordDTO:
    decision = record.decision
    return PellRecordDTO(
        c=record.c,
        branch=_branch_dto(record.branch),
        equation=equation_dto(record.instance),
        constraints=[constraint_dto(c) for c in record.instance.constraints],
        verdict=decision.verdict.value,
        final=record.final,
        witness=list(decision.witness) if decision.witness else None,
        back_substitution=_back_dto(record.back_substitution) if record.back_substitution else None,
        certificate=certificate_dto(decision.certificate) if decision.certificate else None,
    )


def _axis_branch_dto(branch: AxisBranch) -> AxisBranchDTO:
    return AxisBranchDTO(
        numerator=branch.numerator,
        denominator=branch.denominator,
        defined=branch.defined,
        integral=branch.integral,
        value=branch.value,
        square=branch.square,
        roots=list(branch.roots),
    )


def _parity_dto(chain: ParityChain | None) -> ParityChainDTO | None:
    if chain is None:
        return None
    return ParityChainDTO(
        exponent_limit=chain.exponent_limit,
        squares_divisible=chain.squares_divisible,
        order_2_mod_499=chain.order_2_mod_499,
        no_499_up_to=chain.no_499_up_to,
        no_499_in_m=chain.no_499_in_m,
        odd_alpha_excluded=chain.odd_alpha_excluded,
        odd_beta_excluded=chain.odd_beta_excluded,
        holds=chain.holds,
    )


def axis_dto(report: AxisReport) -> AxisDTO:
    return AxisDTO(
        c=report.c,
        x_zero=_axis_branch_dto(report.x_zero),
        y_zero=_axis_branch_dto(report.y_zero),
    )


def build_report(report: ProofReport) -> ProofReportDTO:
    """
    把 ProofReport 转成 JSON 报告模型

    Args:
        report: 证明流水线的结果

    Returns:
        ProofReportDTO: 字段顺序固定，大整数为十进制字符串
    """
    verdict = report.verdict
    derivations = None
    if report.c_derivation is not None and report.xy_classes is not None:
        d = report.c_derivation
        derivations = DerivationsDTO(
            parity=residue_dto(d.parity),
            mod3=residue_dto(d.mod3),
            mod5_by_alpha_mod4={str(k): residue_dto(v) for k, v in sorted(d.mod5_branches.items())},
            excluded_alpha_mod4=d.excluded_alpha_class,
            jacobi_checked_up_to=d.jacobi_checked_up_to,
            selected_mod5=residue_dto(d.selected_mod5),
            x_class=residue_dto(report.xy_classes[0]),
            y_class=residue_dto(report.xy_classes[1]),
            parity_chain=_parity_dto(d.parity_chain),
        )
    base_cases = None
    if report.constants:
        base_cases = BaseCasesDTO(
            alpha=list(report.base_case_alpha),
            beta=list(report.base_case_beta),
            constants=[
                ConstantDTO(name=c.name, derived=c.derived, expected=c.expected, agrees=c.agrees)
                for c in report.constants
            ],
        )
    return ProofReportDTO(
        theorem=TheoremDTO(
            statement=STATEMENT,
            verdict=verdict.kind.value,
            scope=verdict.scope,
            counterexample=verdict.counterexample,
            reason=verdict.reason,
            note=SCAN_NOTE,
        ),
        scan=ScanDTO(
            bounds=[report.alpha_max, report.beta_max], solutions=list(report.scan_result)
        ),
        base_cases=base_cases,
        c_class=residue_dto(report.c_class) if report.c_class else None,
        derivations=derivations,
        ru_zero=[
            RuZeroDTO(family=case.family, d=case.d, coordinate=case.coordinate, c=case.c)
            for case in report.ru_zero
        ],
        candidates={
            f"k{k}": [candidate_dto(c) for c in cands]
            for k, cands in sorted(report.candidates_per_k.items())
        },
        axis=[axis_dto(a) for a in report.axis_results],
        pell=PellSectionDTO(
            decisions=[_record_dto(r) for r in report.pell_decisions],
            unconstrained={str(c): v.value for c, v in sorted(report.unconstrained.items())},
        ),
        config=dict(report.settings),
        versions=_versions(),
    )


def render_report_text(report: ProofReport) -> str:
    """证明报告的文本摘要"""
    lines = [
        f"theorem: {report.verdict.kind.value} (scope={report.verdict.scope})",
        f"scan 0..{report.alpha_max} x 0..{report.beta_max}: "
        f"{sorted(report.scan_result)}",
    ]
    if report.verdict.counterexample is not None:
        lines.append(f"counterexample: n={report.verdict.counterexample}")
    if report.verdict.reason:
        lines.append(f"reason: {report.verdict.reason}")
    if report.constants:
        lines.append(
            f"base cases: alpha={list(report.base_case_alpha)} beta={list(report.base_case_beta)}"
        )
        for check in report.constants:
            mark = "ok" if check.agrees else "MISMATCH"
            lines.append(
                f"  constant {check.name}: derived={check.derived} "
                f"expected={check.expected} {mark}"
            )
    chain = report.c_derivation.parity_chain if report.c_derivation else None
    if chain is not None:
        mark = "ok" if chain.holds else "FAILED"
        lines.append(f"alpha, beta even: ord_499(2)={chain.order_2_mod_499} {mark}")
    if report.c_class is not None:
        lines.append(f"c class: {report.c_class}")
    for k, cands in sorted(report.candidates_per_k.items()):
        lines.append(f"k={k}: {[c.c for c in cands]}")
    for record in report.pell_decisions:
        role = "final" if record.final else "refined"
        lines.append(
            f"  c={record.c} [{record.branch.label}] {record.instance}: "
            f"{record.decision.verdict.value} ({role})"
        )
    for c, verdict in sorted(report.unconstrained.items()):
        lines.append(f"  c={c} unconstrained: {verdict.value} (informational)")
    return "\n".join(lines)


def render_decision_text(inst: PellInstance, decision: PellDecision) -> str:
    lines = [f"{inst}", f"verdict: {decision.verdict.value}"]
    if decision.witness is not None:
        X, Y = decision.witness
        lines.append(f"witness: X={X} Y={Y}")
    cert = decision.certificate
    if cert is not None:
        lines.append(f"unit: t={cert.unit[0]} w={cert.unit[1]}")
        lines.append(f"classes: {[(c.u, c.v) for c in cert.representatives]}")
        if cert.excluded:
            lines.append(f"excluded (A does not divide u): {[(c.u, c.v) for c in cert.excluded]}")
        lines.append(f"orbit modulus: {cert.modulus}")
        for check in cert.checks:
            periods = ", ".join(f"{c.modulus}:{c.period}" for c in check.components)
            lines.append(f"  start {check.start}: periods {periods}, no admissible exponent")
        lines.append(f"checked points: {cert.checked_points}")
    return "\n".join(lines)


def render_expansion_text(expansion: SurdExpansion, terms: int) -> str:
    surd = expansion.surd
    lines = [
        f"({surd.P} + sqrt({surd.D})) / {surd.Q}: preperiod={expansion.preperiod_length} "
        f"period={expansion.period_length}",
        "k\ta_k\ts_k\tt_k\tp_k\tq_k",
    ]
    for k in range(terms):
        p, q = expansion.convergent(k)
        lines.append(f"{k}\t{expansion.quotient(k)}\t{expansion.s(k)}\t{expansion.t(k)}\t{p}\t{q}")
    return "\n".join(lines)


def render_candidates_text(k: int, candidates: tuple[CandidateC, ...]) -> str:
    if not candidates:
        return f"k={k}: no candidates"
    lines = [f"k={k}: {[c.c for c in candidates]}"]
    for cand in candidates:
        shown = ", ".join(f"(d={t.d}, r={t.r}, u={t.u})" for t in cand.witnesses)
        lines.append(f"  c={cand.c}: {shown}")
    return "\n".join(lines)
