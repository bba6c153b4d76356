"""应用组装与 CLI 入口"""

import json
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

import typer

from totient_pell.config import Config, load_config
from totient_pell.container import build_container, shutdown_container
from totient_pell.domain.errors import CertificateError, DomainError, PellResourceExceeded
from totient_pell.domain.models import (
    Constraint,
    PellInstance,
    ProofVerdict,
    ResidueClass,
    Variable,
)
from totient_pell.logging import configure_logging
from totient_pell.numtheory.arith import (
    check_congruence,
    euler_phi,
    factor_over,
    sigma,
    trial_factor,
)
from totient_pell.numtheory.cf import expand
from totient_pell.numtheory.pell import decide
from totient_pell.numtheory.search import enumerate_candidates
from totient_pell.report.render import (
    build_report,
    candidate_dto,
    decision_dto,
    render_candidates_text,
    render_decision_text,
    render_expansion_text,
    render_report_text,
)
from totient_pell.services.proof_service import KNOWN_SOLUTIONS, brute_scan

EXIT_OK = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

app = typer.Typer(
    name="totient-pell",
    help="n*phi(n) = 2 (mod sigma(n)) 在 n = 2^a 5^b 上的机器验证",
    add_completion=False,
)

FormatOption = typer.Option("text", "--format", help="输出格式：text 或 json")
LogLevelOption = typer.Option("WARNING", "--log-level", help="日志级别")


@contextmanager
def _domain_errors() -> Iterator[None]:
    """领域异常映射为退出码：资源超限与证书重放失败 3，其余 2"""
    try:
        yield
    except PellResourceExceeded as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(EXIT_RESOURCE) from e
    except CertificateError as e:
        typer.echo(f"Internal error: certificate replay failed: {e}", err=True)
        raise typer.Exit(EXIT_RESOURCE) from e
    except (DomainError, ValueError) as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(EXIT_USAGE) from e


def _setup(**overrides: object) -> Config:
    config = load_config(**overrides)
    configure_logging(config.log_level)
    return config


def _echo_json(payload: object) -> None:
    typer.echo(json.dumps(payload, indent=2))


def _parse_constraint(text: str) -> Constraint:
    """VAR:RES:MOD，例如 Y:58:60"""
    try:
        variable, residue, modulus = text.split(":")
        return Constraint(Variable(variable.upper()), ResidueClass.of(int(residue), int(modulus)))
    except ValueError as e:
        raise typer.BadParameter(f"constraint must look like VAR:RES:MOD, got {text!r}") from e


@app.command()
def check(
    n: int = typer.Argument(..., help="待检查的正整数"),
    any_n: bool = typer.Option(False, "--any-n", help="允许任意 n（试除法分解，除数 <= 10^6）"),
    output_format: str = FormatOption,
    log_level: str = LogLevelOption,
) -> None:
    """
    检查单个 n 是否满足 n*phi(n) = 2 (mod sigma(n))
    """
    with _domain_errors():
        config = _setup(output_format=output_format, log_level=log_level)
        if n < 1:
            raise ValueError(f"n must be positive, got {n}")
        factored = trial_factor(n) if any_n else factor_over(n, (2, 5))
        if factored is None:
            raise ValueError(f"{n} has a prime factor other than 2 and 5; use --any-n")
        holds = check_congruence(factored)

    if config.output_format == "json":
        _echo_json(
            {
                "n": str(n),
                "factorization": str(factored),
                "phi": str(euler_phi(factored)),
                "sigma": str(sigma(factored)),
                "holds": holds,
            }
        )
    else:
        typer.echo("true" if holds else "false")


@app.command()
def scan(
    alpha_max: int = typer.Option(30, "--alpha-max", help="2 的指数上界"),
    beta_max: int = typer.Option(30, "--beta-max", help="5 的指数上界"),
    output_format: str = FormatOption,
    log_level: str = LogLevelOption,
) -> None:
    """
    穷举 n = 2^a 5^b 中满足同余的 n
    """
    with _domain_errors():
        config = _setup(
            alpha_max=alpha_max, beta_max=beta_max, output_format=output_format, log_level=log_level
        )
        solutions = [n.value() for n in brute_scan(config.alpha_max, config.beta_max)]

    if config.output_format == "json":
        _echo_json({"bounds": [alpha_max, beta_max], "solutions": [str(n) for n in solutions]})
    else:
        typer.echo(" ".join(str(n) for n in solutions))
    if set(solutions) - set(KNOWN_SOLUTIONS):
        raise typer.Exit(EXIT_COUNTEREXAMPLE)


@app.command()
def cf(
    a: int = typer.Argument(..., help="A"),
    b: int = typer.Argument(..., help="B"),
    terms: int = typer.Option(10, "--terms", help="输出的项数"),
    output_format: str = FormatOption,
    log_level: str = LogLevelOption,
) -> None:
    """
    sqrt(A/B) 的连分数：部分商、s/t 表与渐近分数
    """
    with _domain_errors():
        config = _setup(output_format=output_format, log_level=log_level)
        if terms < 1:
            raise ValueError(f"terms must be positive, got {terms}")
        expansion = expand(a, b)
        rows = [
            {
                "k": k,
                "a": expansion.quotient(k),
                "s": expansion.s(k),
                "t": expansion.t(k),
                "p": str(expansion.convergent(k)[0]),
                "q": str(expansion.convergent(k)[1]),
            }
            for k in range(terms)
        ]

    if config.output_format == "json":
        _echo_json(
            {
                "A": a,
                "B": b,
                "preperiod": expansion.preperiod_length,
                "period": expansion.period_length,
                "terms": rows,
            }
        )
    else:
        typer.echo(render_expansion_text(expansion, terms))


@app.command()
def pell(
    a: int = typer.Option(..., "--a", help="Y^2 的系数 A"),
    b: int = typer.Option(..., "--b", help="X^2 的系数 B"),
    n: int = typer.Option(..., "--n", help="右端 N"),
    constraint: list[str] = typer.Option([], "--constraint", help="VAR:RES:MOD，可重复"),
    step_cap: int = typer.Option(10**7, "--pell-step-cap", help="轨道步数上限"),
    output_format: str = FormatOption,
    log_level: str = LogLevelOption,
) -> None:
    """
    判定 A*Y^2 - B*X^2 = N 在同余约束下的可解性
    """
    constraints = tuple(_parse_constraint(text) for text in constraint)
    with _domain_errors():
        config = _setup(pell_step_cap=step_cap, output_format=output_format, log_level=log_level)
        inst = PellInstance(a, b, n, constraints)
        decision = decide(inst, config.pell_step_cap)

    if config.output_format == "json":
        typer.echo(decision_dto(inst, decision).model_dump_json(indent=2))
    else:
        typer.echo(render_decision_text(inst, decision))


@app.command()
def candidates(
    k: int = typer.Option(..., "--k", help="公式编号 0..5"),
    parallelism: str = typer.Option("1", "--parallelism", help="进程数或 auto"),
    output_format: str = FormatOption,
    log_level: str = LogLevelOption,
) -> None:
    """
    枚举第 k 个公式给出的 c = 17 (mod 30) 候选
    """
    with _domain_errors():
        config = _setup(parallelism=parallelism, output_format=output_format, log_level=log_level)
        container = build_container(config)
        try:
            found = enumerate_candidates(k, executor=container.executor)
        finally:
            shutdown_container(container)

    if config.output_format == "json":
        _echo_json({"k": k, "candidates": [candidate_dto(c).model_dump() for c in found]})
    else:
        typer.echo(render_candidates_text(k, found))


@app.command()
def prove(
    out: Path | None = typer.Option(None, "--out", help="JSON 报告写入路径"),
    alpha_max: int = typer.Option(30, "--alpha-max", help="2 的指数上界"),
    beta_max: int = typer.Option(30, "--beta-max", help="5 的指数上界"),
    pell_step_cap: int = typer.Option(10**7, "--pell-step-cap", help="轨道步数上限"),
    parallelism: str = typer.Option("1", "--parallelism", help="进程数或 auto"),
    scan_only: bool = typer.Option(False, "--scan-only", help="只做穷举扫描"),
    output_format: str = FormatOption,
    log_level: str = LogLevelOption,
) -> None:
    """
    运行完整验证并输出报告
    """
    with _domain_errors():
        config = _setup(
            alpha_max=alpha_max,
            beta_max=beta_max,
            pell_step_cap=pell_step_cap,
            parallelism=parallelism,
            scan_only=scan_only,
            output_format=output_format,
            output_path=out,
            log_level=log_level,
        )
        container = build_container(config)
        try:
            report = container.proof_service.prove_theorem()
        finally:
            shutdown_container(container)

    document = build_report(report).model_dump_json(indent=2)
    if config.output_path is not None:
        config.output_path.write_text(document + "\n", encoding="utf-8")
    if config.output_format == "json":
        typer.echo(document)
    else:
        typer.echo(render_report_text(report))

    kind = report.verdict.kind
    if kind is ProofVerdict.COUNTEREXAMPLE:
        raise typer.Exit(EXIT_COUNTEREXAMPLE)
    if kind is ProofVerdict.INCOMPLETE:
        raise typer.Exit(EXIT_RESOURCE)


def cli() -> None:
    """主 CLI 入口"""
    app()


if __name__ == "__main__":
    cli()
