"""报告 DTO - 与 domain 解耦，字段顺序即 JSON 顺序"""

from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field, PlainSerializer

# 可能超出机器字长的整数按十进制字符串输出；读回时 pydantic 把字符串转回 int
BigInt = Annotated[int, PlainSerializer(lambda value: str(value), return_type=str)]


class ReportModel(BaseModel):
    """报告模型基类"""

    model_config = ConfigDict(extra="forbid")


class TheoremDTO(ReportModel):
    statement: str
    verdict: str
    scope: str
    counterexample: BigInt | None = None
    reason: str | None = None
    note: str


class ScanDTO(ReportModel):
    bounds: list[int]
    solutions: list[BigInt]


class ConstantDTO(ReportModel):
    name: str
    derived: int
    expected: int
    agrees: bool


class BaseCasesDTO(ReportModel):
    alpha: list[int]
    beta: list[int]
    constants: list[ConstantDTO]


class ResidueClassDTO(ReportModel):
    residue: BigInt
    modulus: BigInt


class ParityChainDTO(ReportModel):
    exponent_limit: int
    squares_divisible: bool
    order_2_mod_499: int
    no_499_up_to: int
    no_499_in_m: bool
    odd_alpha_excluded: bool
    odd_beta_excluded: bool
    holds: bool


class DerivationsDTO(ReportModel):
    parity: ResidueClassDTO
    mod3: ResidueClassDTO
    mod5_by_alpha_mod4: dict[str, ResidueClassDTO]
    excluded_alpha_mod4: int
    jacobi_checked_up_to: int
    selected_mod5: ResidueClassDTO
    x_class: ResidueClassDTO
    y_class: ResidueClassDTO
    parity_chain: ParityChainDTO | None = None


class RuZeroDTO(ReportModel):
    family: str
    d: int
    coordinate: int
    c: int


class CandidateDTO(ReportModel):
    c: int
    witnesses: list[list[int]] = Field(description="(k, d, r, u) 三元组")


class AxisBranchDTO(ReportModel):
    numerator: int
    denominator: int
    defined: bool
    integral: bool
    value: int | None
    square: bool
    roots: list[int]


class AxisDTO(ReportModel):
    c: int
    x_zero: AxisBranchDTO
    y_zero: AxisBranchDTO


class EquationDTO(ReportModel):
    A: BigInt
    B: BigInt
    N: BigInt


class ConstraintDTO(ReportModel):
    variable: str
    residue: BigInt
    modulus: BigInt


class BranchDTO(ReportModel):
    label: str
    x_class: ResidueClassDTO
    y_class: ResidueClassDTO
    refined_by: list[list[int]]
    constituents: list[ConstraintDTO]


class SolutionClassDTO(ReportModel):
    u: BigInt
    v: BigInt
    v_bounds: list[BigInt]


class OrbitComponentDTO(ReportModel):
    modulus: BigInt
    period: int
    admissible: list[int]


class OrbitCheckDTO(ReportModel):
    start: list[BigInt]
    combined_period: int
    components: list[OrbitComponentDTO]


class CertificateDTO(ReportModel):
    unit: list[BigInt]
    representatives: list[SolutionClassDTO]
    excluded: list[SolutionClassDTO]
    modulus: BigInt
    checks: list[OrbitCheckDTO]
    checked_points: int


class BackSubstitutionDTO(ReportModel):
    x: BigInt | None
    y: BigInt | None
    alpha: int | None
    beta: int | None
    n: BigInt | None
    genuine: bool


class DecisionDTO(ReportModel):
    equation: EquationDTO
    constraints: list[ConstraintDTO]
    verdict: str
    witness: list[BigInt] | None = None
    certificate: CertificateDTO | None = None


class PellRecordDTO(ReportModel):
    c: int
    branch: BranchDTO
    equation: EquationDTO
    constraints: list[ConstraintDTO]
    verdict: str
    final: bool
    witness: list[BigInt] | None = None
    back_substitution: BackSubstitutionDTO | None = None
    certificate: CertificateDTO | None = None


class PellSectionDTO(ReportModel):
    decisions: list[PellRecordDTO]
    unconstrained: dict[str, str] = Field(description="无约束时的判定，仅作参考")


class ProofReportDTO(ReportModel):
    """完整报告；不含时间戳与 run_id，同一配置重跑结果逐字节一致"""

    theorem: TheoremDTO
    scan: ScanDTO
    base_cases: BaseCasesDTO | None
    c_class: ResidueClassDTO | None
    derivations: DerivationsDTO | None
    ru_zero: list[RuZeroDTO]
    candidates: dict[str, list[CandidateDTO]]
    axis: list[AxisDTO]
    pell: PellSectionDTO
    config: dict[str, int | bool]
    versions: dict[str, str]
