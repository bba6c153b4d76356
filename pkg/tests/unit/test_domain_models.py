"""领域模型单元测试"""

import pytest

from totient_pell.domain.errors import InvalidFactorizationError, PerfectSquareError
from totient_pell.domain.models import (
    ConstantCheck,
    Constraint,
    FactoredInteger,
    PellInstance,
    QuadraticSurd,
    ResidueClass,
    Variable,
)


def test_factored_integer_value():
    """测试分解形式的取值与字符串"""
    n = FactoredInteger(((2, 3), (5, 1)))
    assert n.value() == 40
    assert n.exponent_of(2) == 3
    assert n.exponent_of(3) == 0
    assert str(n) == "2^3*5"
    assert str(FactoredInteger()) == "1"


def test_factored_integer_from_exponents():
    """测试指数为 0 的素数被忽略"""
    assert FactoredInteger.from_exponents({5: 2, 2: 0}) == FactoredInteger(((5, 2),))


@pytest.mark.parametrize(
    "factors",
    [((5, 1), (2, 1)), ((4, 1),), ((2, 0),), ((2, 1), (2, 1))],
)
def test_factored_integer_invalid(factors):
    """测试素数未升序、非素数与指数非法"""
    with pytest.raises(InvalidFactorizationError):
        FactoredInteger(factors)


def test_residue_class():
    """测试同余类的规范化与包含"""
    cls = ResidueClass.of(-2, 15)
    assert cls == ResidueClass(13, 15)
    assert cls.contains(58)
    assert not cls.contains(57)
    assert str(cls) == "13 mod 15"
    with pytest.raises(ValueError):
        ResidueClass(15, 15)
    with pytest.raises(ValueError):
        ResidueClass(0, 0)
    with pytest.raises(ValueError):
        ResidueClass.of(1, 0)
    with pytest.raises(ValueError):
        ResidueClass.of(1, -5)


def test_quadratic_surd_validation():
    """测试二次根式的合法性检查"""
    with pytest.raises(PerfectSquareError):
        QuadraticSurd(0, 1, 9)
    with pytest.raises(ValueError):
        QuadraticSurd(0, 3, 7)
    assert QuadraticSurd.sqrt_ratio(3, 2) == QuadraticSurd(0, 2, 6)


def test_pell_instance():
    """测试 Pell 实例的代换与约束检查"""
    inst = PellInstance(19, 15, -29924, (Constraint(Variable.X, ResidueClass(4, 60)),))
    assert inst.D == 285
    assert inst.M == 19 * -29924
    assert inst.classes_for(Variable.X) == (ResidueClass(4, 60),)
    assert inst.classes_for(Variable.Y) == ()
    assert inst.unconstrained().constraints == ()
    assert "19*Y^2 - 15*X^2 = -29924" in str(inst)


def test_pell_instance_invalid():
    """测试非法的 Pell 实例"""
    with pytest.raises(PerfectSquareError):
        PellInstance(2, 8, 1)
    with pytest.raises(ValueError):
        PellInstance(1, 2, 0)
    with pytest.raises(ValueError):
        PellInstance(0, 2, 1)


def test_satisfied_by():
    """测试代入检查包含约束"""
    inst = PellInstance(1, 2, 1, (Constraint(Variable.Y, ResidueClass(1, 4)),))
    assert inst.satisfied_by(2, -3)
    assert not inst.satisfied_by(2, 3)
    assert not inst.satisfied_by(1, 1)


def test_constant_check():
    """测试常数比对"""
    assert ConstantCheck("alpha", 15, 15).agrees
    assert not ConstantCheck("beta", 246, 156).agrees


def test_models_are_immutable():
    """测试领域模型不可变性"""
    cls = ResidueClass(1, 2)
    with pytest.raises(AttributeError):  # frozen dataclass
        cls.residue = 0  # type: ignore
