"""
🧪 Tests del álgebra su(d): base de Gell-Mann, tensores f y d, identidades
"""
import numpy as np
import pytest

from dfskit.core.exceptions import StructureConstantError, ValidationException
from dfskit.services.su_algebra import (
    GellMannBasis,
    basis_invariant_residuals,
    generate_basis,
    jacobi_like_residual,
    structure_constants,
    verify_algebra_identities,
)

SQ3 = np.sqrt(3.0)

# ===============================
# BASE
# ===============================


def test_basis_d3_matches_standard_gell_mann(basis3):
    """Para d=3 la base coincide con λ₁..λ₈ estándar"""
    assert basis3.size == 8
    assert basis3.diagonal_indices == (3, 8)

    lam1 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex)
    lam2 = np.array([[0, -1j, 0], [1j, 0, 0], [0, 0, 0]])
    lam5 = np.array([[0, 0, -1j], [0, 0, 0], [1j, 0, 0]])
    lam8 = np.diag([1, 1, -2]).astype(complex) / SQ3

    assert np.allclose(basis3.element(1), lam1)
    assert np.allclose(basis3.element(2), lam2)
    assert np.allclose(basis3.element(3), np.diag([1, -1, 0]))
    assert np.allclose(basis3.element(5), lam5)
    assert np.allclose(basis3.element(8), lam8)
    print("✅ Base su(3) estándar")


def test_identity_slot_is_zero_label(basis3):
    assert np.allclose(basis3.element(0), np.eye(3))
    assert basis3.full_stack.shape == (9, 3, 3)
    with pytest.raises(ValidationException):
        basis3.element(9)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_basis_invariants(d):
    """Hermítica, sin traza, Tr(λ_a λ_b) = 2δ_ab y d−1 diagonales"""
    basis = generate_basis(d)
    assert basis.size == d * d - 1
    residuals = basis_invariant_residuals(basis)
    assert max(residuals.values()) < 1e-14
    assert basis.diagonal_indices == tuple(l * l - 1 for l in range(2, d + 1))


@pytest.mark.parametrize("d", [0, 1, -3])
def test_invalid_dimension_rejected(d):
    with pytest.raises(ValidationException):
        generate_basis(d)


# ===============================
# TENSORES DE ESTRUCTURA
# ===============================


def test_su3_structure_constants_table(tensors3):
    """Valores tabulados de f_ijk y d_ijk para su(3)"""
    expected_f = {
        (1, 2, 3): 1.0, (1, 4, 7): 0.5, (1, 5, 6): -0.5, (2, 4, 6): 0.5,
        (2, 5, 7): 0.5, (3, 4, 5): 0.5, (3, 6, 7): -0.5,
        (4, 5, 8): SQ3 / 2, (6, 7, 8): SQ3 / 2,
    }
    assert set(tensors3.f) == set(expected_f)
    for triple, value in expected_f.items():
        assert tensors3.f[triple] == pytest.approx(value, abs=1e-14)

    expected_d = {
        (1, 1, 8): 1 / SQ3, (1, 4, 6): 0.5, (1, 5, 7): 0.5, (2, 2, 8): 1 / SQ3,
        (2, 4, 7): -0.5, (2, 5, 6): 0.5, (3, 3, 8): 1 / SQ3, (3, 4, 4): 0.5,
        (3, 5, 5): 0.5, (3, 6, 6): -0.5, (3, 7, 7): -0.5,
        (4, 4, 8): -1 / (2 * SQ3), (5, 5, 8): -1 / (2 * SQ3),
        (6, 6, 8): -1 / (2 * SQ3), (7, 7, 8): -1 / (2 * SQ3), (8, 8, 8): -1 / SQ3,
    }
    assert set(tensors3.dsym) == set(expected_d)
    for triple, value in expected_d.items():
        assert tensors3.dsym[triple] == pytest.approx(value, abs=1e-14)
    print("✅ Tabla de f y d de su(3)")


def test_permuted_lookups(tensors3):
    assert tensors3.f_value(2, 1, 3) == pytest.approx(-1.0)
    assert tensors3.f_value(3, 1, 2) == pytest.approx(1.0)
    assert tensors3.f_value(1, 1, 3) == 0.0
    assert tensors3.d_value(8, 1, 1) == pytest.approx(1 / SQ3)
    assert not tensors3.f_dense[0].any()


def test_su2_levi_civita(basis2):
    """su(2): f = ε y d ≡ 0"""
    tensors = structure_constants(basis2)
    assert tensors.f == pytest.approx({(1, 2, 3): 1.0})
    assert tensors.dsym == {}
    assert np.max(np.abs(tensors.d_core)) == 0.0


def test_complex_structure_constant_is_rejected():
    """Una "base" no hermítica deja parte imaginaria en f"""
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.diag([1, -1]).astype(complex)
    broken = GellMannBasis(dim=2, matrices=(sx, sy, 1j * sz), diagonal_indices=(3,))
    with pytest.raises(StructureConstantError):
        structure_constants(broken)


# ===============================
# IDENTIDADES
# ===============================


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_algebra_identities_hold(d):
    """Todas las identidades dentro de 1e-11"""
    basis = generate_basis(d)
    report = verify_algebra_identities(structure_constants(basis), 1e-11, basis=basis, max_workers=2)
    assert report.passed, report.failed_checks()
    assert report.d == d
    assert {"larels", "jacobi", "jacobi_like", "mac_2_10", "mac_2_18"} <= set(report.residuals)
    print(f"✅ Identidades su({d}) verificadas")


def test_identity_report_flags_tight_tolerance(tensors3, basis3):
    """Con una tolerancia imposible el reporte falla sin lanzar"""
    report = verify_algebra_identities(tensors3, 1e-300, basis=basis3, max_workers=1)
    assert report.passed is False
    assert report.failed_checks()


def test_jacobi_like_detects_generic_tensor(tensors3):
    """Un tensor de coeficientes aleatorio no satisface la condición"""
    rng = np.random.default_rng(7)
    a = rng.standard_normal((8, 8, 8))
    assert jacobi_like_residual(tensors3.f_core, a) > 1e-3
    assert jacobi_like_residual(tensors3.f_core, tensors3.d_core) < 1e-12
