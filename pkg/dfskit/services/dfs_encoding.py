"""
🧬 Codificación DFS de tres qutrits
Dos octetos llevan el qubit lógico; el singlete y el decuplete se construyen como
complemento ortogonal y se separan por autovalores del Casimir
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from dfskit.core.exceptions import DimensionMismatch, ValidationException
from dfskit.services.compat_search import collective_generators
from dfskit.services.operator_core import Operator, basis_ket, transposition
from dfskit.services.su_algebra import GellMannBasis, generate_basis

logger = logging.getLogger(__name__)

QUTRIT = 3
SITES = 3
STATE_DIM = QUTRIT ** SITES
OCTET = 8
NORM_TOL = 1e-8
EIGEN_TOL = 1e-8

# ===============================
# OCTETOS (kets |abc⟩, sitio 0 a la izquierda)
# ===============================

_OCTET0: List[Tuple[Dict[str, float], float]] = [
    ({"200": 1, "020": -1}, np.sqrt(2)),
    ({"100": 1, "010": -1}, np.sqrt(2)),
    ({"011": 1, "101": -1}, np.sqrt(2)),
    ({"211": 1, "121": -1}, np.sqrt(2)),
    ({"122": 1, "212": -1}, np.sqrt(2)),
    ({"022": 1, "202": -1}, np.sqrt(2)),
    ({"021": -1, "120": -1, "201": 1, "210": 1}, 2.0),
    ({"012": 2, "021": 1, "102": -2, "120": -1, "201": -1, "210": 1}, np.sqrt(12)),
]

_OCTET1: List[Tuple[Dict[str, float], float]] = [
    ({"002": -2, "020": 1, "200": 1}, np.sqrt(6)),
    ({"001": -2, "010": 1, "100": 1}, np.sqrt(6)),
    ({"110": -2, "011": 1, "101": 1}, np.sqrt(6)),
    ({"112": -2, "121": 1, "211": 1}, np.sqrt(6)),
    ({"221": -2, "122": 1, "212": 1}, np.sqrt(6)),
    ({"220": -2, "022": 1, "202": 1}, np.sqrt(6)),
    ({"012": -2, "021": 1, "102": -2, "120": 1, "201": 1, "210": 1}, np.sqrt(12)),
    ({"021": 1, "120": -1, "201": 1, "210": -1}, 2.0),
]


def _ket_sum(terms: Dict[str, float], norm: float) -> np.ndarray:
    vec = np.zeros(STATE_DIM, dtype=complex)
    for ket, coeff in terms.items():
        vec += coeff * basis_ket((int(c) for c in ket), QUTRIT)
    return vec / norm


def fix_phase(vec: np.ndarray) -> np.ndarray:
    """Fase global tal que la componente de mayor módulo sea real positiva"""
    pivot = vec[int(np.argmax(np.abs(vec)))]
    if abs(pivot) == 0:
        return vec
    return vec * (abs(pivot) / pivot)


# ===============================
# CASIMIR
# ===============================

def casimir(basis: GellMannBasis, n: int) -> Operator:
    """C₂ = Σ_α S_α²"""
    generators = collective_generators(basis, n)
    total = generators[0] @ generators[0]
    for s in generators[1:]:
        total = total + s @ s
    return total


def _group(values: np.ndarray, tol: float) -> List[List[int]]:
    """Agrupa índices de autovalores ascendentes que difieren menos que tol"""
    groups: List[List[int]] = []
    for idx, value in enumerate(values):
        if groups and abs(value - values[groups[-1][-1]]) <= tol * max(1.0, abs(value)):
            groups[-1].append(idx)
        else:
            groups.append([idx])
    return groups


def generic_permutation_splitter(d: int, n: int) -> Operator:
    """Σ_{p<q} c_pq P_pq con coeficientes distintos; separa las multiplicidades"""
    total = Operator(np.zeros((d ** n, d ** n), dtype=complex), d, n)
    for idx, (p, q) in enumerate(itertools.combinations(range(n), 2)):
        total = total + float(np.sqrt(2.0 + idx)) * transposition(p, q, d, n)
    return total


@dataclass(frozen=True, eq=False)
class CasimirBlock:
    eigenvalue: float
    dim: int
    block_dims: Tuple[int, ...]
    block_values: Tuple[float, ...]
    subspaces: Tuple[np.ndarray, ...] = field(repr=False)


def casimir_decompose(
    basis: GellMannBasis,
    n: int,
    splitter: Optional[Operator] = None,
    tol: float = EIGEN_TOL,
) -> List[CasimirBlock]:
    """
    Diagonaliza C₂, agrupa autoespacios y resuelve cada multiplicidad con un
    elemento del conmutante (por defecto una combinación genérica de
    transposiciones; con Z̄ se obtienen octeto 1 y octeto 0)
    """
    c2 = casimir(basis, n)
    splitter = splitter or generic_permutation_splitter(basis.dim, n)
    if splitter.dim != c2.dim:
        raise DimensionMismatch("casimir_decompose", c2.dim, splitter.dim)

    eigvals, eigvecs = linalg.eigh(c2.matrix)
    blocks: List[CasimirBlock] = []
    for group in _group(eigvals, tol):
        space = eigvecs[:, group]
        restricted = space.conj().T @ splitter.matrix @ space
        restricted = 0.5 * (restricted + restricted.conj().T)
        sub_vals, sub_vecs = linalg.eigh(restricted)
        sub_groups = _group(sub_vals, tol)
        blocks.append(CasimirBlock(
            eigenvalue=float(np.mean(eigvals[group])),
            dim=len(group),
            block_dims=tuple(len(g) for g in sub_groups),
            block_values=tuple(float(np.mean(sub_vals[g])) for g in sub_groups),
            subspaces=tuple(space @ sub_vecs[:, g] for g in sub_groups),
        ))

    dims = [b.block_dims for b in blocks]
    logger.info(f"🧮 Casimir d={basis.dim}, n={n}: autovalores {[round(b.eigenvalue, 8) for b in blocks]}, bloques {dims}")
    return blocks


# ===============================
# CODIFICACIÓN
# ===============================

@dataclass(frozen=True, eq=False)
class DfsEncoding:
    """Octeto 0, octeto 1 y complemento (singlete ⊕ decuplete), vectores por fila"""
    octet0: np.ndarray = field(repr=False)
    octet1: np.ndarray = field(repr=False)
    complement: np.ndarray = field(repr=False)
    complement_casimir: np.ndarray = field(repr=False)
    singlet_dim: int
    decuplet_dim: int

    @property
    def matrix(self) -> np.ndarray:
        """Los 27 vectores de la codificación apilados"""
        return np.vstack([self.octet0, self.octet1, self.complement])

    @property
    def singlet(self) -> np.ndarray:
        return self.complement[: self.singlet_dim]

    @property
    def decuplet(self) -> np.ndarray:
        return self.complement[self.singlet_dim:]

    def projector(self, block: str) -> np.ndarray:
        vectors = {
            "octet0": self.octet0,
            "octet1": self.octet1,
            "complement": self.complement,
            "singlet": self.singlet,
            "decuplet": self.decuplet,
        }.get(block)
        if vectors is None:
            raise ValidationException(f"Bloque desconocido: {block}")
        return vectors.T @ vectors.conj()

    def labeled_vectors(self) -> Iterator[Tuple[str, str, np.ndarray]]:
        for j, vec in enumerate(self.octet0, start=1):
            yield f"psi_{j}^(8,0)", "octet0", vec
        for j, vec in enumerate(self.octet1, start=1):
            yield f"psi_{j}^(8,1)", "octet1", vec
        for j, vec in enumerate(self.singlet, start=1):
            yield f"singlet_{j}", "singlet", vec
        for j, vec in enumerate(self.decuplet, start=1):
            yield f"decuplet_{j}", "decuplet", vec


def octet_states(basis: Optional[GellMannBasis] = None) -> DfsEncoding:
    """
    Octetos transcritos y complemento ortogonal numérico, separado en singlete y
    decuplete por el Casimir
    """
    basis = basis or generate_basis(QUTRIT)
    if basis.dim != QUTRIT:
        raise ValidationException("La codificación por octetos es de qutrits", details={"d": basis.dim})

    octet0 = np.array([_ket_sum(terms, norm) for terms, norm in _OCTET0])
    octet1 = np.array([_ket_sum(terms, norm) for terms, norm in _OCTET1])

    rest = linalg.null_space(np.vstack([octet0, octet1]).conj())
    c2 = casimir(basis, SITES).matrix
    restricted = rest.conj().T @ c2 @ rest
    eigvals, eigvecs = linalg.eigh(0.5 * (restricted + restricted.conj().T))
    complement = np.array([fix_phase(v) for v in (rest @ eigvecs).T])

    groups = _group(eigvals, EIGEN_TOL)
    singlet_dim = len(groups[0]) if len(groups) > 1 else 0
    logger.debug(f"🧬 Complemento: autovalores del Casimir {[round(eigvals[g[0]], 8) for g in groups]}")

    return DfsEncoding(
        octet0=octet0,
        octet1=octet1,
        complement=complement,
        complement_casimir=eigvals,
        singlet_dim=singlet_dim,
        decuplet_dim=complement.shape[0] - singlet_dim,
    )


@dataclass(frozen=True, eq=False)
class LogicalState:
    a: complex
    b: complex
    gauge: np.ndarray = field(repr=False)
    vector: np.ndarray = field(repr=False)


def encode(
    a: complex,
    b: complex,
    gauge: Optional[Sequence[complex]] = None,
    encoding: Optional[DfsEncoding] = None,
) -> LogicalState:
    """|ψ_L⟩ = a·Σα_jψ_j^(8,0) + b·Σα_jψ_j^(8,1), con el mismo gauge en ambos octetos"""
    encoding = encoding or octet_states()
    amplitude_norm = float(np.sqrt(abs(a) ** 2 + abs(b) ** 2))
    if amplitude_norm == 0.0:
        raise ValidationException("Las amplitudes lógicas no pueden ser ambas cero")

    weights = np.full(OCTET, 1.0, dtype=complex) if gauge is None else np.asarray(gauge, dtype=complex)
    if weights.shape != (OCTET,):
        raise ValidationException("El gauge debe tener 8 componentes", details={"received": int(weights.size)})
    gauge_norm = float(np.linalg.norm(weights))
    if gauge_norm == 0.0:
        raise ValidationException("El gauge no puede ser nulo")

    a, b = complex(a) / amplitude_norm, complex(b) / amplitude_norm
    weights = weights / gauge_norm
    vector = a * (weights @ encoding.octet0) + b * (weights @ encoding.octet1)
    return LogicalState(a=a, b=b, gauge=weights, vector=vector)


def _as_vector(state: Union[LogicalState, np.ndarray]) -> np.ndarray:
    vec = state.vector if isinstance(state, LogicalState) else np.asarray(state, dtype=complex)
    if vec.shape != (STATE_DIM,):
        raise DimensionMismatch("logical_populations", STATE_DIM, int(vec.size))
    return vec


def logical_populations(
    state: Union[LogicalState, np.ndarray],
    encoding: Optional[DfsEncoding] = None,
) -> Tuple[float, float, float]:
    """(p0, p1, leak) con leak = 1 − p0 − p1"""
    encoding = encoding or octet_states()
    vec = _as_vector(state)
    deviation = abs(float(np.linalg.norm(vec)) - 1.0)
    if deviation > NORM_TOL:
        raise ValidationException("Estado no normalizado", details={"deviation": deviation})
    p0 = float(np.sum(np.abs(encoding.octet0.conj() @ vec) ** 2))
    p1 = float(np.sum(np.abs(encoding.octet1.conj() @ vec) ** 2))
    return p0, p1, 1.0 - p0 - p1


def gauge_overlap(state: Union[LogicalState, np.ndarray], encoding: DfsEncoding) -> Optional[float]:
    """|⟨ĝ₀, ĝ₁⟩| entre los vectores de gauge normalizados de ambos octetos"""
    vec = _as_vector(state)
    g0 = encoding.octet0.conj() @ vec
    g1 = encoding.octet1.conj() @ vec
    n0, n1 = np.linalg.norm(g0), np.linalg.norm(g1)
    if n0 < NORM_TOL or n1 < NORM_TOL:
        return None
    return float(abs(np.vdot(g0 / n0, g1 / n1)))


# ===============================
# REPORTE DE BLOQUES
# ===============================

@dataclass(frozen=True, eq=False)
class BlockReport:
    block0: np.ndarray = field(repr=False)
    block1: np.ndarray = field(repr=False)
    cross: np.ndarray = field(repr=False)
    cross_block_max: float
    within_block_difference: float
    leakage_max: float

    @property
    def hermitian_deviation(self) -> float:
        return max(float(np.max(np.abs(m - m.conj().T))) for m in (self.block0, self.block1))


def block_report(op: Operator, encoding: Optional[DfsEncoding] = None) -> BlockReport:
    """Elementos de matriz de A en la base de la codificación"""
    encoding = encoding or octet_states()
    if op.dim != STATE_DIM:
        raise DimensionMismatch("block_report", STATE_DIM, op.dim)
    v = encoding.matrix
    m = v.conj() @ op.matrix @ v.T
    o0, o1 = slice(0, OCTET), slice(OCTET, 2 * OCTET)
    rest = slice(2 * OCTET, STATE_DIM)
    cross = m[o0, o1]
    return BlockReport(
        block0=m[o0, o0],
        block1=m[o1, o1],
        cross=cross,
        cross_block_max=float(max(np.max(np.abs(cross)), np.max(np.abs(m[o1, o0])))),
        within_block_difference=float(np.max(np.abs(m[o0, o0] - m[o1, o1]))),
        leakage_max=float(max(np.max(np.abs(m[rest, : 2 * OCTET])), np.max(np.abs(m[: 2 * OCTET, rest])))),
    )


def generator_block_reports(basis: GellMannBasis, encoding: Optional[DfsEncoding] = None) -> List[BlockReport]:
    """Un BlockReport por generador colectivo S_α"""
    encoding = encoding or octet_states(basis)
    return [block_report(s, encoding) for s in collective_generators(basis, SITES)]
