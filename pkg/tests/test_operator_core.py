"""
🧪 Tests del núcleo de operadores
"""
import numpy as np
import pytest

from dfskit.core.exceptions import DimensionMismatch, NonHermitianError, ResourceLimitExceeded, ValidationException
from dfskit.services.operator_core import (
    CoeffTensor,
    Operator,
    basis_ket,
    coeff_expand,
    coeff_inner,
    embed,
    expm_hermitian,
    haar_unitary,
    kron,
    kron_power,
    mu,
    permutation_operator,
    reconstruct,
    site_operator,
    transposition,
)
from dfskit.services.su_algebra import generate_basis


def test_operator_shape_checked():
    with pytest.raises(DimensionMismatch):
        Operator(np.eye(4, dtype=complex), 3, 1)


def test_arithmetic_requires_same_space():
    a = Operator.identity(2, 2)
    b = Operator.identity(4, 1)
    with pytest.raises(DimensionMismatch):
        a + b


def test_numpy_scalar_multiplies_operator():
    op = Operator.identity(3, 1)
    scaled = np.float64(2.5) * op
    assert isinstance(scaled, Operator)
    assert scaled.trace() == pytest.approx(7.5)


def test_mu_uses_zero_label_for_identity(basis3):
    op = mu(basis3, (1, 0, 8))
    expected = np.kron(np.kron(basis3.element(1), np.eye(3)), basis3.element(8))
    assert np.allclose(op.matrix, expected)
    assert (op.d, op.n) == (3, 3)


def test_kron_power_dimension(basis2):
    x = Operator.of(basis2.element(1), 2, 1)
    assert kron_power(x, 3).dim == 8
    assert kron(x, x).n == 2


def test_coefficients_of_product_basis(basis3):
    """Un μ_b aislado tiene coeficiente 1 sólo en b"""
    tensor = coeff_expand(mu(basis3, (2, 0, 5)), basis3)
    support = tensor.support()
    assert len(support) == 1
    assert support[0][0] == (2, 0, 5)
    assert support[0][1] == pytest.approx(1.0)


def test_expand_reconstruct_random_hermitian(basis3):
    rng = np.random.default_rng(11)
    z = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
    h = Operator(z + z.conj().T, 3, 2)
    back = reconstruct(coeff_expand(h, basis3), basis3)
    assert np.max(np.abs(back.matrix - h.matrix)) < 1e-12


def test_coeff_inner_matches_trace(basis2):
    rng = np.random.default_rng(3)
    mats = []
    for _ in range(2):
        z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        mats.append(Operator(z + z.conj().T, 2, 2))
    a, b = (coeff_expand(m, basis2) for m in mats)
    assert coeff_inner(a, b) == pytest.approx(np.trace(mats[0].matrix @ mats[1].matrix).real / 4)


def test_coeff_expand_rejects_non_hermitian(basis2):
    op = Operator(np.array([[0, 1], [0, 0]], dtype=complex), 2, 1)
    with pytest.raises(NonHermitianError):
        coeff_expand(op, basis2)


def test_dense_limit_enforced():
    basis = generate_basis(4)
    with pytest.raises(ResourceLimitExceeded):
        reconstruct(CoeffTensor(np.zeros(1), 4, 6), basis)


def test_embed_places_factors_on_sites(basis3):
    a = Operator.of(basis3.element(1), 3, 1)
    b = Operator.of(basis3.element(4), 3, 1)
    placed = embed(kron(a, b), [2, 0], 3)
    expected = np.kron(np.kron(b.matrix, np.eye(3)), a.matrix)
    assert np.allclose(placed.matrix, expected)


def test_site_operator_and_transposition(basis3):
    x0 = site_operator(basis3.element(1), 0, 3)
    p02 = transposition(0, 2, 3, 3)
    x2 = site_operator(basis3.element(1), 2, 3)
    assert np.allclose((p02 @ x0 @ p02).matrix, x2.matrix)


def test_permutation_moves_site_content():
    """El contenido del sitio s termina en el sitio π(s)"""
    p = permutation_operator([1, 2, 0], 3)
    assert np.allclose(p.apply(basis_ket((0, 1, 2), 3)), basis_ket((2, 0, 1), 3))


def test_expm_hermitian(basis2):
    z = Operator.of(basis2.element(3), 2, 1)
    u = expm_hermitian(z, np.pi / 2)
    assert np.allclose(u.matrix, np.diag([-1j, 1j]))
    with pytest.raises(NonHermitianError):
        expm_hermitian(Operator(np.array([[0, 1], [0, 0]], dtype=complex), 2, 1), 1.0)


def test_haar_unitary_is_unitary_and_seeded():
    u = haar_unitary(3, seed=5)
    assert isinstance(u, Operator)
    assert (u.d, u.n) == (3, 1)
    assert u.is_unitary(1e-12)
    assert np.array_equal(u.matrix, haar_unitary(3, seed=5).matrix)
    assert not np.allclose(u.matrix, haar_unitary(3, seed=6).matrix)


def test_haar_unitary_requires_explicit_randomness():
    with pytest.raises(ValidationException):
        haar_unitary(3)
    with pytest.raises(ValidationException):
        haar_unitary(1, seed=0)
    rng = np.random.default_rng(11)
    assert haar_unitary(2, rng=rng).is_unitary(1e-12)


@pytest.mark.parametrize("d", [2, 3])
def test_haar_first_moment(d):
    """E|U₀₀|² = 1/d sobre 10⁴ muestras"""
    rng = np.random.default_rng(2024)
    samples = [abs(haar_unitary(d, rng=rng).matrix[0, 0]) ** 2 for _ in range(10_000)]
    # desviación estándar de la media ≈ 3e-3 para d = 2 y 3
    assert np.mean(samples) == pytest.approx(1.0 / d, abs=0.015)
