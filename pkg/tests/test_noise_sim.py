"""
🧪 Tests de simulación de ruido colectivo
"""
import numpy as np
import pytest

from dfskit.core.exceptions import ValidationException
from dfskit.services.dfs_encoding import encode, logical_populations
from dfskit.services.logical_gates import u_x
from dfskit.services.noise_sim import (
    control_unitary,
    random_collective_unitary,
    random_stabilizer_element,
    run_trajectory,
    stabilizer_element,
    verify_n_qudit_compat,
)
from dfskit.services.su_algebra import generate_basis

# ===============================
# ESTABILIZADOR
# ===============================


def test_imaginary_coefficients_give_unitary(basis3):
    rng = np.random.default_rng(0)
    element = random_stabilizer_element(basis3, 3, rng)
    assert element.unitary
    assert element.matrix.is_unitary(1e-10)


def test_real_coefficients_flagged_non_unitary(basis2):
    element = stabilizer_element(basis2, [0.5, 0.0, 0.0], 2)
    assert element.unitary is False
    assert not element.matrix.is_unitary(1e-6)


def test_stabilizer_length_checked(basis3):
    with pytest.raises(ValidationException):
        stabilizer_element(basis3, [1j, 0.0], 3)


def test_stabilizer_preserves_encoding(basis3, encoding):
    """Un elemento del estabilizador deja invariantes las poblaciones lógicas"""
    element = random_stabilizer_element(basis3, 3, np.random.default_rng(12))
    state = encode(0.6, 0.8, encoding=encoding)
    p0, p1, leak = logical_populations(element.matrix.apply(state.vector), encoding)
    assert p0 == pytest.approx(0.36, abs=1e-10)
    assert p1 == pytest.approx(0.64, abs=1e-10)
    assert abs(leak) < 1e-10


def test_collective_unitary_is_tensor_power():
    u = random_collective_unitary(3, 3, seed=1)
    assert u.dim == 27
    assert u.is_unitary(1e-10)
    with pytest.raises(ValidationException):
        random_collective_unitary(1, 3, seed=1)


# ===============================
# TRAYECTORIAS
# ===============================


def test_trajectory_without_leakage(encoding, basis3):
    """100 pasos de ruido colectivo: poblaciones constantes y fuga nula"""
    state = encode(0.6, 0.8j, encoding=encoding)
    trajectory = run_trajectory(state, 100, seed=42, encoding=encoding, basis=basis3)
    assert len(trajectory.record) == 101
    assert trajectory.max_leak < 1e-10
    assert trajectory.max_population_drift < 1e-10
    assert trajectory.record[0].p0 == pytest.approx(0.36)
    print("✅ Trayectoria de 100 pasos sin fuga")


@pytest.mark.slow
def test_trajectory_random_logical_states(encoding, basis3):
    """20 estados lógicos aleatorios (con gauge aleatorio) sin fuga tras 100 pasos"""
    rng = np.random.default_rng(20)
    for trial in range(20):
        a, b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        gauge = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        state = encode(a, b, gauge, encoding)
        trajectory = run_trajectory(state, 100, seed=trial, encoding=encoding, basis=basis3)
        assert trajectory.max_leak < 1e-10, trial
        assert trajectory.max_population_drift < 1e-10, trial


def test_every_step_stores_full_operator(encoding, basis3):
    """Los pasos de ruido y el de control se guardan como matrices 27×27"""
    state = encode(1, 0, encoding=encoding)
    trajectory = run_trajectory(state, 4, seed=5, encoding=encoding, basis=basis3, control_step=2)
    assert len(trajectory.steps) == 4
    assert all(step.shape == (27, 27) for step in trajectory.steps)
    assert np.allclose(trajectory.steps[1], control_unitary(basis3, 3).matrix)


def test_trajectory_is_deterministic(encoding, basis3):
    state = encode(1, 1, encoding=encoding)
    first = run_trajectory(state, 10, seed=7, encoding=encoding, basis=basis3)
    second = run_trajectory(state, 10, seed=7, encoding=encoding, basis=basis3)
    assert np.array_equal(first.final_state, second.final_state)
    assert [r.model_dump() for r in first.record] == [r.model_dump() for r in second.record]


def test_gauge_overlap_is_preserved(encoding, basis3):
    """Con gauge compartido el solapamiento se mantiene en 1"""
    gauge = [1, 1j, 0, 2, 0, 0, 1, -1]
    state = encode(1, 1, gauge, encoding)
    trajectory = run_trajectory(state, 20, seed=3, encoding=encoding, basis=basis3)
    for step in trajectory.record:
        assert step.gauge_overlap == pytest.approx(1.0, abs=1e-9)


def test_control_step_leaks(encoding, basis3):
    """Una perturbación de un solo sitio saca población del subespacio lógico"""
    state = encode(1, 0, encoding=encoding)
    trajectory = run_trajectory(state, 5, seed=1, encoding=encoding, basis=basis3, control_step=1)
    assert trajectory.record[1].leak >= 0.25
    assert trajectory.max_leak >= 0.25


def test_gates_applied_between_steps(encoding, basis3):
    """U_X̄(π/2) al inicio lleva |0_L⟩ a |1_L⟩ y el ruido no lo cambia"""
    state = encode(1, 0, encoding=encoding)
    flip = u_x(basis3, np.pi / 2)
    trajectory = run_trajectory(state, 3, seed=2, encoding=encoding, basis=basis3, gates={0: flip})
    assert trajectory.record[0].p1 == pytest.approx(1.0)
    assert trajectory.record[-1].p1 == pytest.approx(1.0)


def test_negative_steps_rejected(encoding):
    with pytest.raises(ValidationException):
        run_trajectory(encode(1, 0, encoding=encoding), -1, seed=0, encoding=encoding)


def test_zero_steps_records_initial_state(encoding, basis3):
    trajectory = run_trajectory(encode(1, 0, encoding=encoding), 0, seed=0, encoding=encoding, basis=basis3)
    assert len(trajectory.record) == 1
    assert trajectory.steps == []


def test_control_unitary_is_local(basis3):
    u = control_unitary(basis3, 3)
    assert u.is_unitary(1e-10)
    with pytest.raises(ValidationException):
        control_unitary(basis3, 3, generator=9)


# ===============================
# BARRIDO n QUDITS
# ===============================


@pytest.mark.parametrize("d,n", [(2, 4), (3, 3), (3, 4), (4, 3)])
def test_n_qudit_compat(d, n):
    report = verify_n_qudit_compat(generate_basis(d), n, 1e-11, max_workers=2)
    assert report.passed, report.failed_checks()
    pairs = n * (n - 1) // 2
    triples = n * (n - 1) * (n - 2) // 6
    assert len(report.residuals) == pairs + 2 * triples
    assert report.checks == len(report.residuals) * (d * d - 1)


def test_zero_coefficients_give_identity(basis3):
    element = stabilizer_element(basis3, np.zeros(8), 3)
    assert np.allclose(element.matrix.matrix, np.eye(27))


def test_single_generator_element_factorizes(basis3):
    """exp(itS₁) = (exp(itλ₁))^⊗n"""
    from scipy import linalg

    t = 0.37
    v = np.zeros(8, dtype=complex)
    v[0] = 1j * t
    element = stabilizer_element(basis3, v, 2)
    local = linalg.expm(1j * t * basis3.element(1))
    assert np.allclose(element.matrix.matrix, np.kron(local, local), atol=1e-12)


def test_stabilizer_has_no_cross_octet_elements(basis3, encoding):
    from dfskit.services.dfs_encoding import block_report

    element = random_stabilizer_element(basis3, 3, np.random.default_rng(5))
    report = block_report(element.matrix, encoding)
    assert report.cross_block_max < 1e-10
    assert report.within_block_difference < 1e-10


def test_collective_unitary_commutes_with_exchange(basis3):
    from dfskit.services.logical_gates import exchange_hamiltonian
    from dfskit.services.operator_core import commutator

    u = random_collective_unitary(3, 3, seed=8)
    for p, q in [(0, 1), (0, 2), (1, 2)]:
        assert commutator(u, exchange_hamiltonian(basis3, p, q, 3)).norm() < 1e-10


def test_single_site_collective_unitary_is_haar():
    from dfskit.services.operator_core import haar_unitary

    assert np.allclose(random_collective_unitary(3, 1, seed=4).matrix, haar_unitary(3, seed=4).matrix)


@pytest.mark.slow
def test_n_qudit_compat_five_qutrits():
    report = verify_n_qudit_compat(generate_basis(3), 5, 1e-11, max_workers=2)
    assert report.passed, report.failed_checks()
