"""
🧪 Tests de la búsqueda del conmutante y sus oráculos
"""
import numpy as np
import pytest

from dfskit.core.exceptions import ResourceLimitExceeded, ValidationException
from dfskit.services.compat_search import (
    build_constraint_system,
    closure_residual,
    cocond_residual,
    collective_generators,
    commutant_basis,
    commutation_residual,
    direct_commutator_coefficients,
    known_coefficients,
    known_hamiltonians,
    match_against_known,
    superoperator_nullity,
    verify_known,
)
from dfskit.services.noise_sim import random_collective_unitary
from dfskit.services.operator_core import (
    CoeffTensor,
    Operator,
    coeff_expand,
    commutator,
    reconstruct,
    transposition,
)
from dfskit.services.su_algebra import generate_basis, structure_constants

# ===============================
# SISTEMA DE RESTRICCIONES
# ===============================


def test_known_coefficients_match_dense_expansion(basis3):
    """Los coeficientes armados desde f y d coinciden con la expansión de las matrices"""
    known = known_coefficients(basis3, 3)
    dense = known_hamiltonians(basis3, 3)
    for name, op in dense.items():
        expanded = coeff_expand(op, basis3)
        assert np.max(np.abs(expanded.values - known[name].values)) < 1e-12, name
    assert known["I"][(0, 0, 0)] == 1.0


def test_constraint_rows_match_direct_commutators(basis2):
    """Las filas slot a slot coinciden con [H, S_α]/(2i) calculado con matrices"""
    rng = np.random.default_rng(2)
    system = build_constraint_system(basis2, 3)
    for _ in range(20):
        coeffs = CoeffTensor(rng.standard_normal((4, 4, 4)), 2, 3)
        assert np.allclose(system.apply(coeffs), direct_commutator_coefficients(coeffs, basis2), atol=1e-12)


def test_constraint_rows_match_direct_commutators_qutrits(basis3):
    rng = np.random.default_rng(4)
    system = build_constraint_system(basis3, 2)
    assert system.rows.shape == (8 * 81, 81)
    for _ in range(20):
        coeffs = CoeffTensor(rng.standard_normal((9, 9)), 3, 2)
        assert np.allclose(system.apply(coeffs), direct_commutator_coefficients(coeffs, basis3), atol=1e-12)

    subset = build_constraint_system(basis3, 2, generators=[1, 5, 8])
    assert subset.rows.shape == (3 * 81, 81)
    assert np.allclose(subset.apply(coeffs), direct_commutator_coefficients(coeffs, basis3, [1, 5, 8]), atol=1e-12)


@pytest.mark.slow
def test_constraint_rows_match_direct_commutators_three_qutrits(basis3):
    rng = np.random.default_rng(6)
    system = build_constraint_system(basis3, 3)
    for _ in range(20):
        coeffs = CoeffTensor(rng.standard_normal((9, 9, 9)), 3, 3)
        assert np.allclose(system.apply(coeffs), direct_commutator_coefficients(coeffs, basis3), atol=1e-11)


def test_constraint_system_validation(basis3):
    with pytest.raises(ValidationException):
        build_constraint_system(basis3, 1)
    with pytest.raises(ValidationException):
        build_constraint_system(basis3, 2, generators=[0])


@pytest.mark.parametrize("d,n", [(2, 3), (3, 3), (3, 4), (4, 3), (5, 3)])
def test_verify_mode_known_hamiltonians_commute(d, n):
    """e_pq, F, D e I están en el núcleo sin SVD"""
    report = verify_known(generate_basis(d), n)
    assert report.mode == "verify"
    assert report.passed, report.residuals
    print(f"✅ Hamiltonianos conocidos conmutan: d={d}, n={n}")


# ===============================
# CONMUTANTE COMPLETO
# ===============================


def test_full_search_qubits(basis2):
    """d=2, n=3: núcleo de dimensión 5 dentro del span conocido"""
    system = build_constraint_system(basis2, 3)
    found = commutant_basis(system)
    assert found.dimension == 5
    assert found.includes_identity
    assert not found.ill_conditioned

    report = match_against_known(found, known_coefficients(basis2, 3))
    assert report.passed, report.residuals
    assert report.nullspace_dim == 5
    for element in found.elements:
        assert commutation_residual(element, basis2) < 1e-9


@pytest.mark.slow
def test_full_search_qutrits(basis3):
    """d=3, n=3: núcleo de dimensión 6 = span{I, e1, e2, e3, F, D}"""
    system = build_constraint_system(basis3, 3)
    found = commutant_basis(system)
    assert found.dimension == 6
    assert found.includes_identity
    assert found.spectral_gap is not None and found.spectral_gap > 1e3

    report = match_against_known(found, known_coefficients(basis3, 3))
    assert report.passed, report.residuals
    assert closure_residual(found, basis3) < 1e-9
    print("✅ Conmutante de tres qutrits recuperado")


@pytest.mark.slow
def test_full_search_four_levels_through_gram_path():
    """d=4, n=3 (4096 columnas): el camino por AᵀA encuentra las 6 dimensiones"""
    basis4 = generate_basis(4)
    system = build_constraint_system(basis4, 3)
    assert system.columns > 1024
    found = commutant_basis(system)
    assert found.dimension == 6
    assert found.includes_identity
    assert not found.ill_conditioned
    assert np.isfinite(found.spectral_gap)

    report = match_against_known(found, known_coefficients(basis4, 3))
    assert report.passed, report.residuals


def test_spectral_gap_is_finite(basis2):
    """La brecha usa el piso de ruido, nunca divide por cero"""
    found = commutant_basis(build_constraint_system(basis2, 3))
    assert found.spectral_gap is not None
    assert np.isfinite(found.spectral_gap)
    assert found.spectral_gap > 1e3


def test_commutant_elements_are_orthonormal(basis2):
    found = commutant_basis(build_constraint_system(basis2, 3))
    ops = [reconstruct(e, basis2).matrix for e in found.elements]
    gram = np.array([[np.trace(a @ b).real / 8 for b in ops] for a in ops])
    assert np.allclose(gram, np.eye(found.dimension), atol=1e-10)


def test_random_hamiltonian_does_not_commute(basis2):
    rng = np.random.default_rng(9)
    coeffs = CoeffTensor(rng.standard_normal((4, 4, 4)), 2, 3)
    assert build_constraint_system(basis2, 3).residual(coeffs) > 1e-3


# ===============================
# ORÁCULOS
# ===============================


def test_superoperator_nullity(basis2, basis3):
    """Nulidad sobre el espacio completo de operadores (complejo)"""
    assert superoperator_nullity(basis2, 3) == 5
    # dos qutrits: span{I, P_01}
    assert superoperator_nullity(basis3, 2) == 2


@pytest.mark.slow
def test_superoperator_nullity_three_qutrits(basis3):
    assert superoperator_nullity(basis3, 3) == 6


def test_superoperator_limit(basis2):
    with pytest.raises(ResourceLimitExceeded):
        superoperator_nullity(basis2, 6)


def test_cocond_condition(tensors3, basis3):
    """F y D cumplen la condición de compatibilidad; un tensor genérico no"""
    assert cocond_residual(basis3, tensors3.f_core, tensors3) < 1e-12
    assert cocond_residual(basis3, tensors3.d_core, tensors3) < 1e-12
    rng = np.random.default_rng(1)
    assert cocond_residual(basis3, rng.standard_normal((8, 8, 8)), tensors3) > 1e-3
    with pytest.raises(ValidationException):
        cocond_residual(basis3, np.zeros((3, 3, 3)), tensors3)


def test_collective_generators_commute_with_collective_unitary(basis3):
    u = random_collective_unitary(3, 2, seed=3)
    for s in collective_generators(basis3, 2):
        rotated = u.matrix @ s.matrix @ u.matrix.conj().T
        # U S_α U† vuelve a ser colectivo: combinación de S_β
        coeffs = coeff_expand(Operator(rotated, 3, 2), basis3)
        assert np.max(np.abs(coeffs.values[1:, 1:])) < 1e-12


def test_structure_tensors_reused(basis3):
    tensors = structure_constants(basis3)
    system = build_constraint_system(basis3, 2, tensors=tensors)
    assert system.columns == 81


@pytest.mark.parametrize("d", [2, 3])
def test_collective_generators_commute_with_transpositions(d):
    """[S_α, P_pq] = 0 para toda transposición de sitios"""
    basis = generate_basis(d)
    swaps = [transposition(0, 1, d, 3), transposition(1, 2, d, 3), transposition(0, 2, d, 3)]
    for s in collective_generators(basis, 3):
        for p in swaps:
            assert np.max(np.abs(commutator(s, p).matrix)) < 1e-12
