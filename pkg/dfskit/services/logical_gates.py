"""
🔐 Compuertas lógicas
Hamiltonianos de intercambio, operadores lógicos X̄, Z̄, Ȳ de tres qudits, sus
exponenciales analíticas, rotaciones de Euler y el SWAP generalizado
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from typing import Dict, Optional, Sequence

import numpy as np

from dfskit.core.exceptions import ValidationException
from dfskit.models.responses import CommutationReport
from dfskit.schemas.gate import GateKind, GateSpec
from dfskit.services.operator_core import (
    Operator,
    commutator,
    distance,
    embed,
    expm_hermitian,
)
from dfskit.services.su_algebra import GellMannBasis, StructureTensors, structure_constants

logger = logging.getLogger(__name__)

SQRT3 = float(np.sqrt(3.0))


class XConvention(str, Enum):
    """Signo de la exponencial de X̄"""
    POSITIVE = "positive"           # I + iX̄ sen t − X̄²(1 − cos t) = exp(+iX̄t)
    SCHRODINGER = "schrodinger"     # exp(−iX̄t)


# ===============================
# HAMILTONIANOS
# ===============================

def _check_sites(sites: Sequence[int], n: int) -> None:
    if len(set(sites)) != len(sites) or any(s < 0 or s >= n for s in sites):
        raise ValidationException("Sitios inválidos", details={"sites": list(sites), "n": n})


def exchange_hamiltonian(basis: GellMannBasis, p: int, q: int, n: int) -> Operator:
    """e_pq = Σ_i λ_i^(p) λ_i^(q)"""
    _check_sites([p, q], n)
    d = basis.dim
    pair = np.einsum("iab,icd->acbd", basis.stack, basis.stack).reshape(d * d, d * d)
    return embed(Operator(pair, d, 2), [p, q], n)


def triple_hamiltonian(
    basis: GellMannBasis,
    tensor: np.ndarray,
    sites: Sequence[int],
    n: int,
) -> Operator:
    """Σ_ijk t_ijk λ_i^(p) λ_j^(q) λ_k^(r) para un tensor de tres índices sobre 1..d²−1"""
    sites = list(sites)
    _check_sites(sites, n)
    if len(sites) != 3:
        raise ValidationException("Se requieren tres sitios", details={"sites": sites})
    d = basis.dim
    stack = basis.stack
    dense = np.einsum("ijk,iab,jce,kgh->acgbeh", tensor, stack, stack, stack, optimize=True)
    return embed(Operator(dense.reshape(d ** 3, d ** 3), d, 3), sites, n)


def f_hamiltonian(basis: GellMannBasis, sites: Sequence[int] = (0, 1, 2), n: int = 3,
                  tensors: Optional[StructureTensors] = None) -> Operator:
    tensors = tensors or structure_constants(basis)
    return triple_hamiltonian(basis, tensors.f_core, sites, n)


def d_hamiltonian(basis: GellMannBasis, sites: Sequence[int] = (0, 1, 2), n: int = 3,
                  tensors: Optional[StructureTensors] = None) -> Operator:
    tensors = tensors or structure_constants(basis)
    return triple_hamiltonian(basis, tensors.d_core, sites, n)


def three_site_hamiltonians(basis: GellMannBasis) -> Dict[str, Operator]:
    """e₁ = e_(1,2), e₂ = e_(0,2), e₃ = e_(0,1), F y D sobre n=3 (sitios 0-based)"""
    tensors = structure_constants(basis)
    return {
        "e1": exchange_hamiltonian(basis, 1, 2, 3),
        "e2": exchange_hamiltonian(basis, 0, 2, 3),
        "e3": exchange_hamiltonian(basis, 0, 1, 3),
        "F": f_hamiltonian(basis, tensors=tensors),
        "D": d_hamiltonian(basis, tensors=tensors),
    }


# ===============================
# OPERADORES LÓGICOS
# ===============================

def xbar(basis: GellMannBasis) -> Operator:
    """X̄ = (e₁ − e₂)/(2√3)"""
    e1 = exchange_hamiltonian(basis, 1, 2, 3)
    e2 = exchange_hamiltonian(basis, 0, 2, 3)
    return (e1 - e2) / (2.0 * SQRT3)


def zbar(basis: GellMannBasis) -> Operator:
    """Z̄ = (e₁ + e₂ − 2e₃)/6"""
    e1 = exchange_hamiltonian(basis, 1, 2, 3)
    e2 = exchange_hamiltonian(basis, 0, 2, 3)
    e3 = exchange_hamiltonian(basis, 0, 1, 3)
    return (e1 + e2 - 2.0 * e3) / 6.0


def ybar(basis: GellMannBasis) -> Operator:
    """Ȳ = F/(2√3), de modo que [Z̄, X̄] = 2iȲ"""
    return f_hamiltonian(basis) / (2.0 * SQRT3)


def _cubic_exponential(op: Operator, t: float, sign: float) -> Operator:
    """I + sign·i·A sen t − A²(1 − cos t), válida cuando A³ = A"""
    identity = Operator.identity(op.d, op.n)
    square = op @ op
    return identity + (sign * 1j * np.sin(t)) * op - (1.0 - np.cos(t)) * square


def u_x(basis: GellMannBasis, t: float, convention: XConvention = XConvention.POSITIVE) -> Operator:
    """
    Exponencial analítica de X̄.

    Con la convención `positive` U_X̄(t)|0_L⟩ = cos t|0_L⟩ + i sen t|1_L⟩, es decir
    exp(+iX̄t); con `schrodinger` es exp(−iX̄t).
    """
    sign = 1.0 if XConvention(convention) is XConvention.POSITIVE else -1.0
    return _cubic_exponential(xbar(basis), t, sign)


def u_z(basis: GellMannBasis, t: float) -> Operator:
    """U_Z̄(t) = I − iZ̄ sen t − Z̄²(1 − cos t) = exp(−iZ̄t)"""
    return _cubic_exponential(zbar(basis), t, -1.0)


def euler(basis: GellMannBasis, alpha: float, beta: float, gamma: float) -> Operator:
    """exp(−iZ̄α)·exp(−iX̄β)·exp(−iZ̄γ)"""
    z = zbar(basis)
    x = xbar(basis)
    return expm_hermitian(z, alpha) @ expm_hermitian(x, beta) @ expm_hermitian(z, gamma)


# ===============================
# SWAP
# ===============================

def _unit(d: int, k: int, l: int) -> np.ndarray:
    m = np.zeros((d, d), dtype=complex)
    m[k, l] = 1.0
    return m


def q_matrix(d: int, k: int, l: int) -> np.ndarray:
    """Q_kl = |k⟩⟨l| ⊗ |l⟩⟨k| + |l⟩⟨k| ⊗ |k⟩⟨l|"""
    return np.kron(_unit(d, k, l), _unit(d, l, k)) + np.kron(_unit(d, l, k), _unit(d, k, l))


def r_matrix(d: int, k: int, l: int) -> np.ndarray:
    """R_kl = |k⟩⟨k| ⊗ |l⟩⟨l| + |l⟩⟨l| ⊗ |k⟩⟨k|"""
    return np.kron(_unit(d, k, k), _unit(d, l, l)) + np.kron(_unit(d, l, l), _unit(d, k, k))


def pair_factor(d: int, k: int, l: int, t: float) -> Operator:
    """U_kl(t) = I − iQ_kl sen 2t + R_kl(cos 2t − 1)"""
    if k == l:
        raise ValidationException("Se requieren niveles distintos", details={"k": k, "l": l})
    matrix = np.eye(d * d, dtype=complex) - 1j * np.sin(2 * t) * q_matrix(d, k, l) \
        + (np.cos(2 * t) - 1.0) * r_matrix(d, k, l)
    return Operator(matrix, d, 2)


def xi_matrix(basis: GellMannBasis) -> np.ndarray:
    """ξ_mn = Σ_{i∈I} (λ_i)_mm (λ_i)_nn sobre los generadores diagonales"""
    diagonals = np.array([np.real(np.diag(basis.element(i))) for i in basis.diagonal_indices])
    return diagonals.T @ diagonals


def diagonal_exponential(basis: GellMannBasis, t: float) -> Operator:
    """exp(−it Σ_{i∈I} λ_i ⊗ λ_i) = Σ_mn exp(−itξ_mn)|mn⟩⟨mn|"""
    xi = xi_matrix(basis)
    return Operator(np.diag(np.exp(-1j * t * xi).reshape(-1)), basis.dim, 2)


def k_operator(d: int) -> Operator:
    """K = Σ_{k<l} Q_kl (mitad de la parte no diagonal de Σλ⊗λ)"""
    matrix = sum((q_matrix(d, k, l) for k in range(d) for l in range(k + 1, d)),
                 np.zeros((d * d, d * d), dtype=complex))
    return Operator(matrix, d, 2)


def k_exponential(d: int, t: float) -> Operator:
    """exp(−itK) = (I − K²) + K² cos t − iK sen t"""
    k = k_operator(d)
    square = k @ k
    identity = Operator.identity(d, 2)
    return (identity - square) + np.cos(t) * square - (1j * np.sin(t)) * k


def _swap_two_site(basis: GellMannBasis, t: float) -> Operator:
    d = basis.dim
    factors = [pair_factor(d, k, l, t) for k in range(d) for l in range(k + 1, d)]
    return reduce(lambda acc, u: acc @ u, factors, diagonal_exponential(basis, t))


def exchange_unitary(basis: GellMannBasis, p: int, q: int, n: int, t: float) -> Operator:
    """
    exp(−it e_pq) armado analíticamente: exponencial diagonal y luego los factores
    U_kl en orden lexicográfico (todos conmutan)
    """
    if p == q:
        raise ValidationException("Se requieren sitios distintos", details={"p": p, "q": q})
    _check_sites([p, q], n)
    return embed(_swap_two_site(basis, t), [p, q], n)


def swap_phase(d: int) -> complex:
    """Fase global del SWAP en t = π/4: −i·e^{iπ/(2d)}"""
    return complex(-1j * np.exp(1j * np.pi / (2 * d)))


@dataclass(frozen=True, eq=False)
class SwapDiagnostics:
    k: Operator = field(repr=False)
    ksq_diagonal: np.ndarray
    xi: np.ndarray
    phase: complex
    residuals: Dict[str, float]


def swap_diagnostics(basis: GellMannBasis) -> SwapDiagnostics:
    d = basis.dim
    k = k_operator(d)
    square = k @ k
    cube = square @ k
    xi = xi_matrix(basis)

    swap = _swap_two_site(basis, np.pi / 4)
    # fase medida sobre |01⟩ → |10⟩
    phase = complex(swap.matrix[1 * d + 0, 0 * d + 1])

    expected_xi = 2.0 * np.eye(d) - 2.0 / d
    flip = np.zeros((d * d, d * d))
    for a in range(d):
        for b in range(d):
            flip[b * d + a, a * d + b] = 1.0
    residuals = {
        "k_cubed": distance(cube, k),
        "k_squared_diagonal": float(np.max(np.abs(square.matrix - np.diag(np.diag(square.matrix))))),
        "xi": float(np.max(np.abs(xi - expected_xi))),
        "swap_phase": float(np.max(np.abs(swap.matrix - swap_phase(d) * flip))),
        "k_exponential": distance(k_exponential(d, np.pi / 4), expm_hermitian(k, np.pi / 4)),
    }
    logger.debug(f"🔁 Diagnóstico SWAP d={d}: fase {phase:.6f}")
    return SwapDiagnostics(
        k=k,
        ksq_diagonal=np.real(np.diag(square.matrix)).copy(),
        xi=xi,
        phase=phase,
        residuals=residuals,
    )


# ===============================
# CONSTRUCCIÓN POR GateSpec
# ===============================

def build_gate(basis: GellMannBasis, spec: GateSpec,
               convention: XConvention = XConvention.POSITIVE) -> Operator:
    """Unitario de la compuerta descrita por `spec` a tiempo spec.t"""
    if basis.dim != spec.d:
        raise ValidationException("La base no coincide con d", details={"basis": basis.dim, "d": spec.d})
    kind = spec.kind
    if kind is GateKind.SWAP:
        return exchange_unitary(basis, spec.sites[0], spec.sites[1], spec.n, spec.t)
    if kind is GateKind.EXCHANGE:
        return expm_hermitian(exchange_hamiltonian(basis, spec.sites[0], spec.sites[1], spec.n), spec.t)
    if kind is GateKind.F_TRIPLE:
        return expm_hermitian(f_hamiltonian(basis, spec.sites, spec.n), spec.t)
    if kind is GateKind.D_TRIPLE:
        return expm_hermitian(d_hamiltonian(basis, spec.sites, spec.n), spec.t)
    if kind is GateKind.XBAR:
        return u_x(basis, spec.t, convention)
    if kind is GateKind.ZBAR:
        return u_z(basis, spec.t)
    return expm_hermitian(ybar(basis), spec.t)


# ===============================
# TABLA DE CONMUTACIÓN
# ===============================

def verify_commutation_table(basis: GellMannBasis, tolerance: float = 1e-11) -> CommutationReport:
    """
    Conmutadores entre e₁, e₂, e₃, F, D, identidades de producto y el álgebra de
    Pauli de X̄, Ȳ, Z̄ para n = 3
    """
    d = basis.dim
    h = three_site_hamiltonians(basis)
    e1, e2, e3, f, dd = h["e1"], h["e2"], h["e3"], h["F"], h["D"]
    identity = Operator.identity(d, 3)
    x = (e1 - e2) / (2.0 * SQRT3)
    z = (e1 + e2 - 2.0 * e3) / 6.0
    y = f / (2.0 * SQRT3)

    def square_rhs(e: Operator) -> Operator:
        return (4.0 / d ** 2) * (d ** 2 - 1) * identity - (4.0 / d) * e

    def product_rhs(e: Operator) -> Operator:
        return (2.0 / d) * e - 1j * f + dd

    def times_d_rhs(ej: Operator, ek: Operator) -> Operator:
        return (2.0 * (d ** 2 - 4) / d ** 2) * (ej + ek) - (6.0 / d) * dd

    residuals = {
        "comm_e1_e2": distance(commutator(e1, e2), -2j * f),
        "comm_e1_e3": distance(commutator(e1, e3), 2j * f),
        "comm_e2_e3": distance(commutator(e2, e3), -2j * f),
        "comm_e1_f": distance(commutator(e1, f), 4j * (e2 - e3)),
        "comm_e2_f": distance(commutator(e2, f), 4j * (e3 - e1)),
        "comm_e3_f": distance(commutator(e3, f), 4j * (e1 - e2)),
        "comm_e1_d": commutator(e1, dd).norm(),
        "comm_e2_d": commutator(e2, dd).norm(),
        "comm_e3_d": commutator(e3, dd).norm(),
        "comm_f_d": commutator(f, dd).norm(),
        "product_e1_e1": distance(e1 @ e1, square_rhs(e1)),
        "product_e2_e2": distance(e2 @ e2, square_rhs(e2)),
        "product_e3_e3": distance(e3 @ e3, square_rhs(e3)),
        "product_e1_e2": distance(e1 @ e2, product_rhs(e3)),
        "product_e2_e3": distance(e2 @ e3, product_rhs(e1)),
        "product_e3_e1": distance(e3 @ e1, product_rhs(e2)),
        "product_e1_d": distance(e1 @ dd, times_d_rhs(e2, e3)),
        "product_e2_d": distance(e2 @ dd, times_d_rhs(e3, e1)),
        "product_e3_d": distance(e3 @ dd, times_d_rhs(e1, e2)),
        "pauli_z_x": distance(commutator(z, x), 2j * y),
        "pauli_x_y": distance(commutator(x, y), 2j * z),
        "pauli_y_z": distance(commutator(y, z), 2j * x),
        "xbar_cubed": distance(x @ x @ x, x),
        "zbar_cubed": distance(z @ z @ z, z),
    }

    report = CommutationReport.from_residuals(residuals, tolerance, d=d)
    if report.passed:
        logger.info(f"✅ Tabla de conmutación d={d} verificada")
    else:
        logger.warning(f"⚠️ Tabla de conmutación d={d} fuera de tolerancia: {report.failed_checks()}")
    return report


def analytic_residuals(basis: GellMannBasis, times: Sequence[float]) -> Dict[str, float]:
    """Máxima diferencia entre cada forma analítica y la exponencial genérica"""
    d = basis.dim
    x, z = xbar(basis), zbar(basis)
    pair = exchange_hamiltonian(basis, 0, 1, 2)
    k = k_operator(d)
    diagonal = sum((np.kron(basis.element(i), basis.element(i)) for i in basis.diagonal_indices),
                   np.zeros((d * d, d * d), dtype=complex))
    diagonal_op = Operator(diagonal, d, 2)

    worst = {"unitary_x": 0.0, "unitary_z": 0.0, "exchange": 0.0, "diagonal": 0.0, "k": 0.0}
    for t in times:
        worst["unitary_x"] = max(worst["unitary_x"], distance(u_x(basis, t), expm_hermitian(x, -t)))
        worst["unitary_z"] = max(worst["unitary_z"], distance(u_z(basis, t), expm_hermitian(z, t)))
        worst["exchange"] = max(worst["exchange"],
                                distance(exchange_unitary(basis, 0, 1, 2, t), expm_hermitian(pair, t)))
        worst["diagonal"] = max(worst["diagonal"],
                                distance(diagonal_exponential(basis, t), expm_hermitian(diagonal_op, t)))
        worst["k"] = max(worst["k"], distance(k_exponential(d, t), expm_hermitian(k, t)))
    return worst
