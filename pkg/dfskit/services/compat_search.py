"""
🔎 Búsqueda de Hamiltonianos compatibles
Sistema lineal [H, S_α] = 0 en el espacio de coeficientes, conmutante por SVD y
proyección sobre {I, e₁, e₂, e₃, F, D}
"""
from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, sparse

from dfskit.core.config import settings
from dfskit.core.exceptions import ResourceLimitExceeded, ValidationException
from dfskit.models.responses import DecompositionReport
from dfskit.services.logical_gates import (
    d_hamiltonian,
    exchange_hamiltonian,
    f_hamiltonian,
)
from dfskit.services.operator_core import (
    CoeffTensor,
    Operator,
    coeff_expand,
    commutator,
    reconstruct,
    site_operator,
    trace_norms,
)
from dfskit.services.su_algebra import GellMannBasis, StructureTensors, structure_constants

logger = logging.getLogger(__name__)

# Tamaño máximo del sistema para SVD densa directa; por encima se usa la matriz de Gram
DENSE_SVD_COLUMNS = 1024
COMMUTE_TOL = 1e-9


# ===============================
# GENERADORES Y HAMILTONIANOS CONOCIDOS
# ===============================

def collective_generators(basis: GellMannBasis, n: int) -> List[Operator]:
    """S_α = Σ_r λ_α^(r), α = 1..d²−1"""
    if n < 2:
        raise ValidationException("Se requieren al menos dos qudits", details={"n": n})
    dim = basis.dim ** n
    if dim > settings.dense_limit:
        raise ResourceLimitExceeded("collective_generators", dim, settings.dense_limit)
    generators = []
    for matrix in basis.matrices:
        total = site_operator(matrix, 0, n)
        for r in range(1, n):
            total = total + site_operator(matrix, r, n)
        generators.append(total)
    return generators


def _known_names(n: int) -> List[Tuple[str, str, Tuple[int, ...]]]:
    """(nombre, tipo, sitios); para n=3 se usan los nombres e1, e2, e3, F, D"""
    if n == 3:
        return [("e1", "exchange", (1, 2)), ("e2", "exchange", (0, 2)), ("e3", "exchange", (0, 1)),
                ("F", "f", (0, 1, 2)), ("D", "d", (0, 1, 2))]
    names: List[Tuple[str, str, Tuple[int, ...]]] = []
    for p, q in itertools.combinations(range(n), 2):
        names.append((f"e({p},{q})", "exchange", (p, q)))
    for triple in itertools.combinations(range(n), 3):
        label = ",".join(str(s) for s in triple)
        names.append((f"F({label})", "f", triple))
        names.append((f"D({label})", "d", triple))
    return names


def known_hamiltonians(basis: GellMannBasis, n: int = 3) -> Dict[str, Operator]:
    """e_pq, F y D sobre todos los pares y triples de sitios"""
    tensors = structure_constants(basis)
    out: Dict[str, Operator] = {}
    for name, kind, sites in _known_names(n):
        if kind == "exchange":
            out[name] = exchange_hamiltonian(basis, sites[0], sites[1], n)
        elif kind == "f":
            out[name] = f_hamiltonian(basis, sites, n, tensors=tensors)
        else:
            out[name] = d_hamiltonian(basis, sites, n, tensors=tensors)
    return out


def known_coefficients(basis: GellMannBasis, n: int = 3,
                       tensors: Optional[StructureTensors] = None) -> Dict[str, CoeffTensor]:
    """
    Coeficientes de los Hamiltonianos conocidos escritos directamente desde f y d,
    sin construir matrices. Incluye la identidad.
    """
    tensors = tensors or structure_constants(basis)
    d = basis.dim
    size = d * d
    shape = (size,) * n

    identity = np.zeros(shape)
    identity[(0,) * n] = 1.0
    out = {"I": CoeffTensor(identity, d, n)}

    for name, kind, sites in _known_names(n):
        values = np.zeros(shape)
        if kind == "exchange":
            for i in range(1, size):
                index = [0] * n
                index[sites[0]] = index[sites[1]] = i
                values[tuple(index)] = 1.0
        else:
            dense = tensors.f_dense if kind == "f" else tensors.d_dense
            # coloca el bloque (d², d², d²) sobre los ejes de los tres sitios
            view = np.moveaxis(values, list(sites), [0, 1, 2])
            view[(slice(None),) * 3 + (0,) * (n - 3)] = dense
        out[name] = CoeffTensor(values, d, n)
    return out


# ===============================
# SISTEMA DE RESTRICCIONES
# ===============================

@dataclass(frozen=True, eq=False)
class ConstraintSystem:
    """
    Filas reales que mapean el vector de coeficientes a los coeficientes de
    [H, S_α]/(2i), apiladas para cada α de `generators`
    """
    d: int
    n: int
    rows: sparse.csr_matrix = field(repr=False)
    generators: Tuple[int, ...]

    @property
    def columns(self) -> int:
        return self.rows.shape[1]

    def apply(self, coeffs: CoeffTensor) -> np.ndarray:
        if (coeffs.d, coeffs.n) != (self.d, self.n):
            raise ValidationException("Coeficientes con (d, n) distintos al sistema",
                                      details={"system": [self.d, self.n], "coeffs": [coeffs.d, coeffs.n]})
        return self.rows @ coeffs.flat()

    def residual(self, coeffs: CoeffTensor) -> float:
        values = self.apply(coeffs)
        return float(np.max(np.abs(values))) if values.size else 0.0


def _slot_matrix(tensors: StructureTensors, alpha: int) -> sparse.csr_matrix:
    """G_α[k, j] = f[j, α, k]: acción de [·, λ_α]/(2i) sobre un solo índice"""
    return sparse.csr_matrix(tensors.f_dense[:, alpha, :].T)


def _generator_rows(tensors: StructureTensors, alpha: int, n: int) -> sparse.csr_matrix:
    size = tensors.dim ** 2
    slot = _slot_matrix(tensors, alpha)
    eye = sparse.identity(size, format="csr")
    total = None
    for s in range(n):
        factors = [eye] * n
        factors[s] = slot
        term = factors[0]
        for factor in factors[1:]:
            term = sparse.kron(term, factor, format="csr")
        total = term if total is None else total + term
    return total


def build_constraint_system(
    basis: GellMannBasis,
    n: int = 3,
    generators: Optional[Sequence[int]] = None,
    tensors: Optional[StructureTensors] = None,
) -> ConstraintSystem:
    """
    Arma las restricciones slot a slot desde f: [λ_b, λ_α] = 2i f_{bαk} λ_k en cada
    posición, sin materializar conmutadores de dimensión dⁿ. Los índices 0 no
    aportan términos.
    """
    if n < 2:
        raise ValidationException("Se requieren al menos dos qudits", details={"n": n})
    tensors = tensors or structure_constants(basis)
    labels = tuple(generators) if generators is not None else tuple(range(1, basis.size + 1))
    if any(a < 1 or a > basis.size for a in labels):
        raise ValidationException("Generador fuera de rango", details={"generators": list(labels)})

    with ThreadPoolExecutor(max_workers=settings.workers) as pool:
        blocks = list(pool.map(lambda a: _generator_rows(tensors, a, n), labels))
    rows = sparse.vstack(blocks, format="csr")
    logger.info(f"🧮 Sistema de restricciones d={basis.dim}, n={n}: {rows.shape[0]}×{rows.shape[1]}, nnz={rows.nnz}")
    return ConstraintSystem(d=basis.dim, n=n, rows=rows, generators=labels)


# ===============================
# CONMUTANTE
# ===============================

@dataclass(frozen=True, eq=False)
class CommutantBasis:
    d: int
    n: int
    elements: List[CoeffTensor]
    includes_identity: bool
    singular_values: np.ndarray = field(repr=False)
    spectral_gap: Optional[float] = None
    ill_conditioned: bool = False

    @property
    def dimension(self) -> int:
        return len(self.elements)


def _weights(d: int, n: int) -> np.ndarray:
    """Pesos Tr(μ_b²)/dⁿ del producto interno en coeficientes"""
    return (trace_norms(d, n) / d ** n).reshape(-1)


def _gram_schmidt(vectors: np.ndarray, weights: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Gram-Schmidt modificado con el producto interno ponderado; vectores por columna"""
    out: List[np.ndarray] = []
    for k in range(vectors.shape[1]):
        v = vectors[:, k].copy()
        for u in out:
            v -= np.dot(weights * u, v) * u
        norm = np.sqrt(np.dot(weights * v, v))
        if norm > tol:
            out.append(v / norm)
    if not out:
        return np.zeros((vectors.shape[0], 0))
    return np.stack(out, axis=1)


def _right_singular(rows: sparse.csr_matrix) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    Valores singulares ascendentes, vectores singulares derechos (por columna) y el
    piso de ruido numérico en la escala de σ
    """
    eps = float(np.finfo(float).eps)
    if rows.shape[1] <= DENSE_SVD_COLUMNS:
        _, sigma, vh = linalg.svd(rows.toarray(), full_matrices=rows.shape[0] < rows.shape[1])
        full = np.zeros(rows.shape[1])
        full[: sigma.size] = sigma
        order = np.argsort(full, kind="stable")
        floor = eps * max(rows.shape) * float(full.max(initial=0.0))
        return full[order], vh.T[:, order], floor
    # eigh de AᵀA: el ruido de los autovalores (~eps·λ_max) se vuelve √ en σ
    gram = (rows.T @ rows).toarray()
    eigvals, eigvecs = linalg.eigh(gram)
    lambda_max = float(eigvals[-1]) if eigvals.size else 0.0
    floor = float(np.sqrt(eps * gram.shape[0] * max(lambda_max, 0.0)))
    return np.sqrt(np.clip(eigvals, 0.0, None)), eigvecs, floor


def commutant_basis(
    system: ConstraintSystem,
    tolerance: Optional[float] = None,
    gap_ratio: Optional[float] = None,
) -> CommutantBasis:
    """
    Núcleo por umbral max(tolerance·σ_max, piso de ruido), ortonormalizado con
    Gram-Schmidt modificado. Una brecha espectral pobre se reporta, no se lanza.
    """
    tolerance = tolerance or settings.svd_threshold
    gap_ratio = gap_ratio or settings.gap_ratio

    sigma, vectors, noise_floor = _right_singular(system.rows)
    sigma_max = float(sigma[-1]) if sigma.size else 0.0
    threshold = max(tolerance * sigma_max, noise_floor)
    null_mask = sigma <= threshold
    kept = sigma[~null_mask]
    discarded = sigma[null_mask]

    spectral_gap: Optional[float] = None
    if kept.size and discarded.size:
        largest_discarded = max(float(np.max(discarded)), noise_floor, np.finfo(float).tiny)
        spectral_gap = float(np.min(kept) / largest_discarded)
    ill_conditioned = spectral_gap is not None and spectral_gap < gap_ratio
    if ill_conditioned:
        logger.warning(f"⚠️ Brecha espectral pobre en el conmutante: {spectral_gap:.3e} < {gap_ratio:.1e}")

    weights = _weights(system.d, system.n)
    ortho = _gram_schmidt(vectors[:, null_mask], weights)
    shape = (system.d ** 2,) * system.n
    elements = [CoeffTensor(ortho[:, k].reshape(shape), system.d, system.n) for k in range(ortho.shape[1])]

    identity = np.zeros(ortho.shape[0])
    identity[0] = 1.0
    residue = identity - ortho @ (ortho.T @ (weights * identity)) if elements else identity
    includes_identity = bool(np.max(np.abs(residue)) < COMMUTE_TOL)

    logger.info(f"✅ Conmutante d={system.d}, n={system.n}: dimensión {len(elements)}")
    return CommutantBasis(
        d=system.d,
        n=system.n,
        elements=elements,
        includes_identity=includes_identity,
        singular_values=sigma,
        spectral_gap=spectral_gap,
        ill_conditioned=ill_conditioned,
    )


def commutation_residual(coeffs: CoeffTensor, basis: GellMannBasis,
                         generators: Optional[List[Operator]] = None) -> float:
    """max_α ‖[H, S_α]‖_max con H reconstruido desde los coeficientes"""
    h = reconstruct(coeffs, basis)
    generators = generators or collective_generators(basis, coeffs.n)
    return max(commutator(h, s).norm() for s in generators)


def match_against_known(
    found: CommutantBasis,
    known: Dict[str, CoeffTensor],
    mode: str = "full",
    tolerance: float = COMMUTE_TOL,
) -> DecompositionReport:
    """
    Proyección por mínimos cuadrados (producto interno de traza) de cada elemento
    encontrado sobre el span de los conocidos
    """
    names = list(known)
    weights = np.sqrt(_weights(found.d, found.n))
    columns = np.stack([known[name].flat() for name in names], axis=1)
    weighted = weights[:, None] * columns

    residuals: List[float] = []
    decomposition: List[List[Tuple[str, float]]] = []
    change: List[List[float]] = []
    for element in found.elements:
        target = weights * element.flat()
        coeffs, *_ = linalg.lstsq(weighted, target)
        residual = float(np.max(np.abs(weighted @ coeffs - target)))
        residuals.append(residual)
        change.append([float(c) for c in coeffs])
        decomposition.append([(name, float(c)) for name, c in zip(names, coeffs) if abs(c) > 1e-12])

    report = DecompositionReport(
        d=found.d,
        n=found.n,
        mode=mode,
        nullspace_dim=found.dimension,
        residuals=residuals,
        decomposition=decomposition,
        change_of_basis=change,
        known_names=names,
        spectral_gap=found.spectral_gap,
        ill_conditioned=found.ill_conditioned,
        tolerance=tolerance,
    )
    if not report.passed:
        logger.warning(f"⚠️ Elementos del conmutante fuera del span conocido: max residuo {max(residuals):.3e}")
    return report


def verify_known(
    basis: GellMannBasis,
    n: int = 3,
    system: Optional[ConstraintSystem] = None,
    tolerance: float = COMMUTE_TOL,
) -> DecompositionReport:
    """Modo verificación: aplica el sistema a los coeficientes conocidos sin SVD"""
    tensors = structure_constants(basis)
    system = system or build_constraint_system(basis, n, tensors=tensors)
    known = known_coefficients(basis, n, tensors=tensors)
    by_name = {name: system.residual(coeffs) for name, coeffs in known.items()}
    return DecompositionReport(
        d=basis.dim,
        n=n,
        mode="verify",
        nullspace_dim=None,
        residuals=list(by_name.values()),
        known_names=list(known),
        known_residuals=by_name,
        tolerance=tolerance,
    )


# ===============================
# ORÁCULOS Y CHEQUEOS CRUZADOS
# ===============================

def direct_commutator_coefficients(coeffs: CoeffTensor, basis: GellMannBasis,
                                   generators: Optional[Sequence[int]] = None) -> np.ndarray:
    """
    Camino de fuerza bruta: reconstruye H, calcula [H, S_α]/(2i) como matriz y lo
    vuelve a expandir. Debe coincidir con ConstraintSystem.apply.
    """
    h = reconstruct(coeffs, basis)
    all_generators = collective_generators(basis, coeffs.n)
    labels = generators if generators is not None else range(1, basis.size + 1)
    blocks = []
    for alpha in labels:
        c = commutator(h, all_generators[alpha - 1]) / 2j
        blocks.append(coeff_expand(c, basis).flat())
    return np.concatenate(blocks)


def superoperator_nullity(basis: GellMannBasis, n: int, threshold: Optional[float] = None) -> int:
    """
    Dimensión del núcleo de H ↦ ([H,S_1], …) sobre el espacio completo de operadores,
    por SVD densa de las filas I⊗S_αᵀ − S_α⊗I (vectorización por filas)
    """
    threshold = threshold or settings.svd_threshold
    generators = collective_generators(basis, n)
    dim = basis.dim ** n
    if dim * dim > DENSE_SVD_COLUMNS:
        raise ResourceLimitExceeded("superoperator_nullity", dim * dim, DENSE_SVD_COLUMNS)
    eye = np.eye(dim)
    rows = np.vstack([np.kron(eye, s.matrix.T) - np.kron(s.matrix, eye) for s in generators])
    sigma = linalg.svd(rows, compute_uv=False)
    full = np.zeros(dim * dim)
    full[: sigma.size] = sigma
    nullity = int(np.sum(full <= threshold * float(np.max(full))))
    logger.debug(f"🔎 Nulidad del superoperador d={basis.dim}, n={n}: {nullity}")
    return nullity


def cocond_residual(basis: GellMannBasis, a: np.ndarray,
                    tensors: Optional[StructureTensors] = None) -> float:
    """
    Condición de compatibilidad para H = Σ a_ijk μ_ijk con índices no nulos:
    max |Σ_l f_{lmi} a_{ljk} + f_{lmj} a_{ilk} + f_{lmk} a_{ijl}| sobre i, j, k, m
    """
    tensors = tensors or structure_constants(basis)
    f = tensors.f_core
    if a.shape != f.shape:
        raise ValidationException("Tensor de coeficientes con forma inválida",
                                  details={"expected": list(f.shape), "received": list(a.shape)})
    worst = 0.0
    for m in range(f.shape[1]):
        g = f[:, m, :]
        total = np.tensordot(g, a, axes=([0], [0])) \
            + np.transpose(np.tensordot(g, a, axes=([0], [1])), (1, 0, 2)) \
            + np.transpose(np.tensordot(g, a, axes=([0], [2])), (1, 2, 0))
        worst = max(worst, float(np.max(np.abs(total))))
    return worst


def closure_residual(found: CommutantBasis, basis: GellMannBasis) -> float:
    """i[H_a, H_b] re-expandido dentro del span encontrado"""
    if not found.elements:
        return 0.0
    weights = _weights(found.d, found.n)
    span = np.stack([e.flat() for e in found.elements], axis=1)
    operators = [reconstruct(e, basis) for e in found.elements]
    worst = 0.0
    for a, b in itertools.combinations(range(len(operators)), 2):
        c = coeff_expand(1j * commutator(operators[a], operators[b]), basis).flat()
        projected = span @ (span.T @ (weights * c))
        worst = max(worst, float(np.max(np.abs(c - projected))))
    return worst
