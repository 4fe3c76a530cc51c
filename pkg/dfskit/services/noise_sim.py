"""
🌪️ Simulación de ruido colectivo
Elementos del estabilizador, unitarios colectivos de Haar, trayectorias sobre
estados codificados y barridos de compatibilidad en n qudits
"""
from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy import linalg

from dfskit.core.config import settings
from dfskit.core.exceptions import ValidationException
from dfskit.models.responses import CompatReport
from dfskit.schemas.exports import TrajectoryStep
from dfskit.services.compat_search import collective_generators
from dfskit.services.dfs_encoding import (
    DfsEncoding,
    LogicalState,
    gauge_overlap,
    logical_populations,
    octet_states,
)
from dfskit.services.logical_gates import d_hamiltonian, exchange_hamiltonian, f_hamiltonian
from dfskit.services.operator_core import (
    Operator,
    commutator,
    expm_hermitian,
    haar_unitary,
    kron_power,
    site_operator,
)
from dfskit.services.su_algebra import GellMannBasis, generate_basis, structure_constants

logger = logging.getLogger(__name__)

UNITARY_TOL = 1e-10


# ===============================
# ESTABILIZADOR
# ===============================

@dataclass(frozen=True, eq=False)
class StabilizerElement:
    v: np.ndarray
    matrix: Operator = field(repr=False)
    unitary: bool


def stabilizer_element(basis: GellMannBasis, v: Sequence[complex], n: int) -> StabilizerElement:
    """exp(Σ_α v_α S_α); es unitario sólo si todos los v_α son imaginarios puros"""
    coeffs = np.asarray(v, dtype=complex)
    if coeffs.shape != (basis.size,):
        raise ValidationException(
            "Longitud de coeficientes inválida",
            details={"expected": basis.size, "received": int(coeffs.size)}
        )
    generators = collective_generators(basis, n)
    exponent = sum((c * s.matrix for c, s in zip(coeffs, generators)),
                   np.zeros((basis.dim ** n, basis.dim ** n), dtype=complex))
    unitary = bool(np.max(np.abs(coeffs.real)) <= UNITARY_TOL) if coeffs.size else True
    if not unitary:
        logger.debug("⚠️ Elemento del estabilizador no unitario (v con parte real)")
    return StabilizerElement(v=coeffs, matrix=Operator(linalg.expm(exponent), basis.dim, n), unitary=unitary)


def random_stabilizer_element(basis: GellMannBasis, n: int, rng: np.random.Generator) -> StabilizerElement:
    """v = i·θ con θ gaussiano: elemento unitario"""
    return stabilizer_element(basis, 1j * rng.standard_normal(basis.size), n)


# ===============================
# UNITARIOS COLECTIVOS
# ===============================

def random_collective_unitary(d: int, n: int, seed: Optional[int] = None,
                              rng: Optional[np.random.Generator] = None) -> Operator:
    """U^⊗n con U de Haar; requiere seed o rng"""
    if d < 2 or n < 1:
        raise ValidationException("Parámetros inválidos", details={"d": d, "n": n})
    return kron_power(haar_unitary(d, seed=seed, rng=rng), n)


def control_unitary(basis: GellMannBasis, n: int, site: int = 0, generator: int = 1,
                    angle: float = np.pi / 2) -> Operator:
    """exp(−i·angle·λ_generator) sobre un solo sitio (perturbación no colectiva)"""
    if not 1 <= generator <= basis.size:
        raise ValidationException("Generador fuera de rango", details={"generator": generator})
    local = expm_hermitian(Operator(basis.element(generator).copy(), basis.dim, 1), angle)
    return site_operator(local.matrix, site, n)


# ===============================
# TRAYECTORIAS
# ===============================

@dataclass(frozen=True, eq=False)
class NoiseTrajectory:
    seed: int
    steps: List[np.ndarray] = field(repr=False)     # operador dⁿ×dⁿ aplicado en cada paso
    record: List[TrajectoryStep]
    final_state: np.ndarray = field(repr=False)

    @property
    def max_leak(self) -> float:
        return max(abs(r.leak) for r in self.record)

    @property
    def max_population_drift(self) -> float:
        first = self.record[0]
        return max(max(abs(r.p0 - first.p0), abs(r.p1 - first.p1)) for r in self.record)


def _record(step: int, vector: np.ndarray, encoding: DfsEncoding) -> TrajectoryStep:
    p0, p1, leak = logical_populations(vector, encoding)
    return TrajectoryStep(step=step, p0=p0, p1=p1, leak=leak, gauge_overlap=gauge_overlap(vector, encoding))


def run_trajectory(
    state: LogicalState,
    steps: int,
    seed: int,
    encoding: Optional[DfsEncoding] = None,
    basis: Optional[GellMannBasis] = None,
    control_step: Optional[int] = None,
    gates: Optional[Dict[int, Operator]] = None,
) -> NoiseTrajectory:
    """
    Aplica `steps` unitarios colectivos independientes (semilla por paso derivada de
    `seed`) y registra poblaciones, fuga y solapamiento de gauge tras cada paso.

    Args:
        control_step: paso que se reemplaza por la perturbación de un solo sitio
        gates: compuertas aplicadas después del paso indicado (0 = antes del ruido)
    """
    if steps < 0:
        raise ValidationException("steps debe ser >= 0", details={"steps": steps})
    basis = basis or generate_basis(3)
    encoding = encoding or octet_states(basis)
    gates = gates or {}
    d, n = 3, 3

    vector = state.vector.copy()
    if 0 in gates:
        vector = gates[0].apply(vector)
    record = [_record(0, vector, encoding)]
    applied: List[np.ndarray] = []

    step_seeds = np.random.SeedSequence(seed).generate_state(steps) if steps else []
    for k, step_seed in enumerate(step_seeds, start=1):
        if control_step is not None and k == control_step:
            op = control_unitary(basis, n)
            logger.debug(f"⚠️ Paso {k}: perturbación de control en el sitio 0")
        else:
            op = kron_power(haar_unitary(d, seed=int(step_seed)), n)
        applied.append(op.matrix)
        vector = op.apply(vector)
        if k in gates:
            vector = gates[k].apply(vector)
        record.append(_record(k, vector, encoding))

    trajectory = NoiseTrajectory(seed=seed, steps=applied, record=record, final_state=vector)
    logger.info(f"🌪️ Trayectoria seed={seed}: {steps} pasos, fuga máxima {trajectory.max_leak:.3e}")
    return trajectory


# ===============================
# BARRIDO DE COMPATIBILIDAD
# ===============================

def verify_n_qudit_compat(basis: GellMannBasis, n: int, tolerance: float = 1e-11,
                          max_workers: Optional[int] = None) -> CompatReport:
    """
    ‖[H, S_α]‖_max para todo e_pq, F_pqr y D_pqr sobre n sitios y todo α.
    Cada residuo se nombra por el Hamiltoniano y sus sitios.
    """
    generators = collective_generators(basis, n)
    tensors = structure_constants(basis)

    builders: Dict[str, Callable[[], Operator]] = {}
    for p, q in itertools.combinations(range(n), 2):
        builders[f"exchange({p},{q})"] = lambda p=p, q=q: exchange_hamiltonian(basis, p, q, n)
    for triple in itertools.combinations(range(n), 3):
        label = ",".join(str(s) for s in triple)
        builders[f"f_triple({label})"] = lambda t=triple: f_hamiltonian(basis, t, n, tensors=tensors)
        builders[f"d_triple({label})"] = lambda t=triple: d_hamiltonian(basis, t, n, tensors=tensors)

    def residual(build: Callable[[], Operator]) -> float:
        h = build()
        return max(commutator(h, s).norm() for s in generators)

    with ThreadPoolExecutor(max_workers=max_workers or settings.workers) as pool:
        futures = {name: pool.submit(residual, build) for name, build in builders.items()}
        residuals = {name: future.result() for name, future in futures.items()}

    report = CompatReport.from_residuals(
        residuals, tolerance, d=basis.dim, n=n, checks=len(residuals) * len(generators)
    )
    if report.passed:
        logger.info(f"✅ Compatibilidad d={basis.dim}, n={n}: {report.checks} conmutadores dentro de tolerancia")
    else:
        logger.warning(f"⚠️ Compatibilidad d={basis.dim}, n={n} fuera de tolerancia: {report.failed_checks()}")
    return report
