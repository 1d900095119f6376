"""
测试联络场：预设分量、Γ_μ 组装与挠率/曲率/场强
"""
import numpy as np
import pytest

from lawless.errors import (
    DimensionMismatch,
    FileNotFound,
    InvalidParameter,
    NonDifferentiable,
    OutOfChart,
    SchemaError,
)
from lawless.models import ConnectionField, GroupSpec
from lawless.runtime.fields import (
    connection_at,
    field_from_dict,
    field_strengths,
    load_field,
    lorentz_matrix,
)

U1 = GroupSpec(factors=["U1"])
SU2 = GroupSpec(factors=["SU2"])
POINCARE = GroupSpec(factors=["POINCARE"])


def _field(preset: str, **params) -> ConnectionField:
    return ConnectionField(chart_dim=2, preset=preset, params=params)


def test_zero_field_connection():
    gamma = connection_at(_field("zero"), U1, [0.3, -0.2])
    assert gamma.shape == (2, 1, 1)
    assert np.all(gamma == 0)


def test_u1_connection_uses_charge():
    """Γ_μ = −A_μ T，T = [−e]"""
    gamma = connection_at(_field("u1_constant", A=[0.7, 0.0]), GroupSpec(factors=["U1:2"]), [0.0, 0.0])
    assert gamma[0, 0, 0] == pytest.approx(1.4)
    assert gamma[1, 0, 0] == 0.0


def test_flat_solder_connection_is_translation():
    field = _field("flat_solder")
    gamma = connection_at(field, POINCARE, [1.0, 2.0])
    for mu in range(2):
        expected = np.zeros((5, 5), dtype=complex)
        expected[mu, 4] = 1j
        assert np.allclose(gamma[mu], expected)


def test_u1_linear_field_strength():
    """A_y = B x 的场强 F_xy = B"""
    strengths = field_strengths(_field("u1_linear", B=1.7), U1, [0.3, -0.4])
    assert strengths.field[0, 1, 0] == pytest.approx(1.7, abs=1e-8)
    assert strengths.field[1, 0, 0] == pytest.approx(-1.7, abs=1e-8)
    assert strengths.field[0, 0, 0] == 0.0


def test_constant_fields():
    """常数阿贝尔势无场强；常数非阿贝尔势的场强来自对易子"""
    abelian = field_strengths(_field("u1_constant", A=[0.4, -1.2]), U1, [0.0, 0.0])
    assert np.allclose(abelian.field, 0.0, atol=1e-12)

    nonabelian = field_strengths(_field("su2_constant"), SU2, [0.0, 0.0])
    assert np.allclose(nonabelian.field[0, 1], [0.0, 0.0, 1.0], atol=1e-12)


def test_torsion_preset():
    """θ^1_1 = 1 + τ x^0 给出 Q_01^1 = τ；两个不对易的常数 ω 给出曲率"""
    strengths = field_strengths(_field("torsion", tau=0.3, rot=0.5), POINCARE, [0.0, 0.0])
    assert strengths.torsion[0, 1, 1] == pytest.approx(0.3, abs=1e-8)
    assert np.allclose(strengths.torsion, -np.swapaxes(strengths.torsion, 0, 1))

    l12, l13 = 0.5 * lorentz_matrix(1, 2), 0.5 * lorentz_matrix(1, 3)
    assert np.allclose(strengths.curvature[0, 1], l12 @ l13 - l13 @ l12, atol=1e-10)
    assert np.linalg.norm(strengths.curvature[0, 1]) > 0.1


def test_solenoid_field_strength():
    """芯内均匀场 Φ/(πr²)，芯外无场强，边界不可微"""
    field = _field("solenoid", flux=np.pi, radius=0.5)
    assert field_strengths(field, U1, [0.0, 0.1]).field[0, 1, 0] == pytest.approx(4.0, abs=1e-8)
    assert field_strengths(field, U1, [2.0, 0.5]).field[0, 1, 0] == pytest.approx(0.0, abs=1e-8)
    with pytest.raises(NonDifferentiable):
        field_strengths(field, U1, [0.5, 0.0])


def test_sampled_field():
    """网格采样的线性势在插值下精确，二阶差分给出 F = B"""
    axis = np.linspace(-1.0, 1.0, 21)
    values = np.zeros((21, 21, 2, 1))
    values[:, :, 1, 0] = 0.6 * axis[:, None]
    field = ConnectionField(
        chart_dim=2,
        preset="sampled",
        params={"kind": "U1", "axes": [axis.tolist(), axis.tolist()], "values": values.tolist()},
    )
    strengths = field_strengths(field, U1, [0.2, 0.1])
    assert strengths.field[0, 1, 0] == pytest.approx(0.6, abs=1e-10)
    assert connection_at(field, U1, [0.5, 0.0])[1, 0, 0] == pytest.approx(0.3, abs=1e-12)
    with pytest.raises(OutOfChart):
        connection_at(field, U1, [1.5, 0.0])


def test_chart_and_dimension_checks():
    field = _field("u1_bump")
    with pytest.raises(OutOfChart):
        connection_at(field, U1, [11.0, 0.0])
    with pytest.raises(DimensionMismatch):
        connection_at(field, U1, [0.0, 0.0, 0.0])
    with pytest.raises(InvalidParameter):
        ConnectionField(chart_dim=5, preset="zero")


def test_field_from_dict_validation():
    omega = np.zeros((2, 4, 4))
    omega[0, 1, 2] = 1.0
    with pytest.raises(InvalidParameter):
        field_from_dict({"chart_dim": 2, "factors": ["POINCARE"], "preset": "torsion",
                         "parameters": {"omega": omega.tolist()}})
    with pytest.raises(InvalidParameter):
        field_from_dict({"chart_dim": 2, "factors": ["U1"], "preset": "torsion"})
    with pytest.raises(InvalidParameter):
        field_from_dict({"chart_dim": 2, "factors": ["U1"], "preset": "su2_smooth"})
    with pytest.raises(SchemaError):
        field_from_dict({"chart_dim": 2, "factors": ["U1"], "preset": "no_such_preset"})
    with pytest.raises(SchemaError):
        field_from_dict({"chart_dim": 2, "preset": "zero"})


def test_load_field_files(data_dir):
    field, spec = load_field(str(data_dir / "fields" / "torsion.json"))
    assert field.preset == "torsion"
    assert spec.tag == "POINCARE"
    field, spec = load_field(str(data_dir / "fields" / "solenoid.json"))
    assert field.params["radius"] == 0.5
    with pytest.raises(FileNotFound):
        load_field(str(data_dir / "fields" / "missing.json"))
