"""领域异常"""


class DomainError(Exception):
    """领域层基础异常"""

    pass


class InvalidFactorizationError(DomainError):
    """因子分解不合法（素数未升序、非素数、指数 < 1）"""

    pass


class FactorizationError(DomainError):
    """试除法无法完成分解"""

    pass


class InconsistentResiduesError(DomainError):
    """同余类互相矛盾，CRT 无解"""

    pass


class NonInvertibleError(DomainError):
    """gcd(g, m) != 1"""

    pass


class EvenModulusError(DomainError):
    """Jacobi 符号要求奇正模"""

    pass


class PerfectSquareError(DomainError):
    """D 为完全平方数（二次根式退化为有理数）"""

    pass


class PellResourceExceeded(DomainError):
    """轨道枚举超过步数上限，判定未完成"""

    def __init__(self, message: str, steps: int, cap: int) -> None:
        super().__init__(message)
        self.steps = steps
        self.cap = cap

    def __reduce__(self) -> tuple[type, tuple[str, int, int]]:
        # 跨进程传递时保留 steps / cap
        return (type(self), (str(self), self.steps, self.cap))


class CertificateError(DomainError):
    """证书或见证重放失败"""

    pass


class ConfigurationError(DomainError):
    """配置错误"""

    pass
