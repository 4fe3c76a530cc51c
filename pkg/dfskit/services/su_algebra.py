"""
🧮 Álgebra su(d)
Bases de Gell-Mann generalizadas, tensores f y d, y verificación de identidades
"""
from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from dfskit.core.config import settings
from dfskit.core.exceptions import StructureConstantError, ValidationException
from dfskit.models.responses import IdentityReport

logger = logging.getLogger(__name__)

# ===============================
# CONSTANTES
# ===============================

HERMITIAN_TOL = 1e-14
IMAG_RESIDUE_TOL = 1e-12
ZERO_CUTOFF = 1e-13

Triple = Tuple[int, int, int]


# ===============================
# BASE DE GELL-MANN
# ===============================

@dataclass(frozen=True, eq=False)
class GellMannBasis:
    """
    Base ordenada de d²−1 matrices hermíticas sin traza con Tr(λ_a λ_b) = 2δ_ab.

    Las etiquetas de generador van de 1 a d²−1; la etiqueta 0 se reserva para la
    identidad en las tuplas μ. Los kets computacionales son 0-based.
    """
    dim: int
    matrices: Tuple[np.ndarray, ...] = field(repr=False)
    diagonal_indices: Tuple[int, ...]

    @property
    def size(self) -> int:
        """Número de generadores d²−1"""
        return len(self.matrices)

    @cached_property
    def stack(self) -> np.ndarray:
        """Generadores apilados, forma (d²−1, d, d)"""
        out = np.stack(self.matrices)
        out.setflags(write=False)
        return out

    @cached_property
    def full_stack(self) -> np.ndarray:
        """Identidad en el slot 0 seguida de los generadores, forma (d², d, d)"""
        out = np.concatenate([np.eye(self.dim, dtype=complex)[None], self.stack])
        out.setflags(write=False)
        return out

    def element(self, label: int) -> np.ndarray:
        """λ_label, con λ_0 = identidad"""
        if not 0 <= label <= self.size:
            raise ValidationException(
                f"Índice de base fuera de rango: {label}",
                details={"label": label, "max": self.size}
            )
        return self.full_stack[label]


def _symmetric(d: int, k: int, l: int) -> np.ndarray:
    m = np.zeros((d, d), dtype=complex)
    m[k, l] = m[l, k] = 1.0
    return m


def _antisymmetric(d: int, k: int, l: int) -> np.ndarray:
    m = np.zeros((d, d), dtype=complex)
    m[k, l] = -1j
    m[l, k] = 1j
    return m


def _diagonal(d: int, l: int) -> np.ndarray:
    """Matriz diagonal de sub-dimensión l: l−1 unos y −(l−1), con ceros añadidos"""
    entries = np.zeros(d)
    entries[: l - 1] = 1.0
    entries[l - 1] = -(l - 1)
    return np.diag(np.sqrt(2.0 / (l * (l - 1))) * entries).astype(complex)


def generate_basis(d: int) -> GellMannBasis:
    """
    Genera la base canónica de su(d).

    Orden: para l = 2..d, para k = 1..l−1 se emite simétrica(k,l) y luego
    antisimétrica(k,l); al cerrar cada l se emite la diagonal de sub-dimensión l.
    Para d=3 reproduce λ₁..λ₈ estándar y los índices diagonales son {l²−1}.
    """
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise ValidationException("La dimensión debe ser un entero d >= 2", details={"d": d})

    matrices: List[np.ndarray] = []
    diagonal: List[int] = []
    for l in range(2, d + 1):
        for k in range(1, l):
            matrices.append(_symmetric(d, k - 1, l - 1))
            matrices.append(_antisymmetric(d, k - 1, l - 1))
        matrices.append(_diagonal(d, l))
        diagonal.append(len(matrices))

    for m in matrices:
        m.setflags(write=False)

    logger.debug(f"🧮 Base de Gell-Mann generada: d={d}, {len(matrices)} generadores")
    return GellMannBasis(dim=int(d), matrices=tuple(matrices), diagonal_indices=tuple(diagonal))


def basis_invariant_residuals(basis: GellMannBasis) -> Dict[str, float]:
    """Residuos de hermiticidad, traza y normalización de la base"""
    stack = basis.stack
    gram = np.einsum("aij,bji->ab", stack, stack)
    off_diagonal = 0.0
    for label in basis.diagonal_indices:
        m = basis.element(label)
        off_diagonal = max(off_diagonal, float(np.max(np.abs(m - np.diag(np.diag(m))))))
    return {
        "hermitian": float(np.max(np.abs(stack - np.conj(np.transpose(stack, (0, 2, 1)))))),
        "traceless": float(np.max(np.abs(np.einsum("aii->a", stack)))),
        "normalization": float(np.max(np.abs(gram - 2.0 * np.eye(basis.size)))),
        "diagonal_offdiag": off_diagonal,
        "diagonal_count": float(abs(len(basis.diagonal_indices) - (basis.dim - 1))),
    }


# ===============================
# TENSORES DE ESTRUCTURA
# ===============================

def _permutation_sign(triple: Triple) -> int:
    """Signo de la permutación que ordena el triple (0 si hay índices repetidos)"""
    a, b, c = triple
    if a == b or b == c or a == c:
        return 0
    inversions = (a > b) + (a > c) + (b > c)
    return -1 if inversions % 2 else 1


@dataclass(frozen=True)
class StructureTensors:
    """
    Tensores f (antisimétrico) y d (simétrico) guardados por triples canónicos
    ordenados. Las formas densas tienen dimensión (d², d², d²) con el slot 0 nulo.
    """
    dim: int
    f: Dict[Triple, float]
    dsym: Dict[Triple, float]
    f_dense: np.ndarray = field(repr=False, compare=False)
    d_dense: np.ndarray = field(repr=False, compare=False)

    def f_value(self, i: int, j: int, k: int) -> float:
        triple = (i, j, k)
        sign = _permutation_sign(triple)
        if sign == 0:
            return 0.0
        return sign * self.f.get(tuple(sorted(triple)), 0.0)

    def d_value(self, i: int, j: int, k: int) -> float:
        return self.dsym.get(tuple(sorted((i, j, k))), 0.0)

    @property
    def f_core(self) -> np.ndarray:
        """f restringido a las etiquetas 1..d²−1"""
        return self.f_dense[1:, 1:, 1:]

    @property
    def d_core(self) -> np.ndarray:
        return self.d_dense[1:, 1:, 1:]


def _sparse_canonical(dense: np.ndarray, strict: bool) -> Dict[Triple, float]:
    """Un representante por órbita: i<j<k (antisimétrico) o i<=j<=k (simétrico)"""
    size = dense.shape[0]
    combos = itertools.combinations(range(1, size), 3) if strict \
        else itertools.combinations_with_replacement(range(1, size), 3)
    out: Dict[Triple, float] = {}
    for triple in combos:
        value = float(dense[triple])
        if abs(value) >= ZERO_CUTOFF:
            out[triple] = value
    return out


def structure_constants(basis: GellMannBasis) -> StructureTensors:
    """
    f_ijk = −(i/4)·Tr([λ_i,λ_j]λ_k) y d_ijk = (1/4)·Tr({λ_i,λ_j}λ_k).
    Falla si algún valor conserva parte imaginaria >= 1e-12.
    """
    stack = basis.stack
    triple_trace = np.einsum("iab,jbc,kca->ijk", stack, stack, stack, optimize=True)
    swapped = np.transpose(triple_trace, (1, 0, 2))

    f_complex = -0.25j * (triple_trace - swapped)
    d_complex = 0.25 * (triple_trace + swapped)

    for name, values in (("f", f_complex), ("dsym", d_complex)):
        residue = float(np.max(np.abs(values.imag)))
        if residue >= IMAG_RESIDUE_TOL:
            raise StructureConstantError(name, residue)

    size = basis.size + 1
    f_dense = np.zeros((size, size, size))
    d_dense = np.zeros((size, size, size))
    f_dense[1:, 1:, 1:] = np.where(np.abs(f_complex.real) < ZERO_CUTOFF, 0.0, f_complex.real)
    d_dense[1:, 1:, 1:] = np.where(np.abs(d_complex.real) < ZERO_CUTOFF, 0.0, d_complex.real)
    f_dense.setflags(write=False)
    d_dense.setflags(write=False)

    tensors = StructureTensors(
        dim=basis.dim,
        f=_sparse_canonical(f_dense, strict=True),
        dsym=_sparse_canonical(d_dense, strict=False),
        f_dense=f_dense,
        d_dense=d_dense,
    )
    logger.debug(f"🧮 Tensores de estructura d={basis.dim}: {len(tensors.f)} f, {len(tensors.dsym)} dsym canónicos")
    return tensors


# ===============================
# IDENTIDADES
# ===============================

def jacobi_like_residual(f: np.ndarray, a: np.ndarray) -> float:
    """
    max |f_ilm a_jkl + f_jlm a_kil + f_klm a_ijl| sobre i,j,k,m.

    Con a = f es la identidad de Jacobi, con a = d la de tipo Jacobi, y con un
    tensor de coeficientes genérico es la condición de compatibilidad a tres sitios.
    """
    worst = 0.0
    for m in range(f.shape[2]):
        g = np.tensordot(f[:, :, m], a, axes=([1], [2]))
        total = g + np.transpose(g, (2, 0, 1)) + np.transpose(g, (1, 2, 0))
        worst = max(worst, float(np.max(np.abs(total))))
    return worst


def _cyclic_triple(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """T_ijk = a_piq b_qjr c_rkp"""
    size = a.shape[0]
    out = np.empty((size, size, size))
    for i in range(size):
        x = np.tensordot(a[:, i, :], b, axes=([1], [0]))
        out[i] = np.tensordot(x, c, axes=([0, 2], [2, 0]))
    return out


def _mac_2_10(f: np.ndarray, dt: np.ndarray, d: int) -> float:
    """f_ijm f_klm − (2/d)(δ_ik δ_jl − δ_il δ_jk) − (d_ikm d_jlm − d_jkm d_ilm)"""
    size = f.shape[0]
    eye = np.eye(size)
    worst = 0.0
    for i in range(size):
        lhs = np.tensordot(f[i], f, axes=([1], [2]))
        delta = np.zeros((size, size, size))
        delta[:, i, :] += eye
        delta[:, :, i] -= eye
        dd = np.transpose(np.tensordot(dt[i], dt, axes=([1], [2])), (1, 0, 2)) \
            - np.tensordot(dt, dt[i], axes=([2], [1]))
        worst = max(worst, float(np.max(np.abs(lhs - (2.0 / d) * delta - dd))))
    return worst


def identity_checks(tensors: StructureTensors, basis: Optional[GellMannBasis] = None) -> Dict[str, Callable[[], float]]:
    """Mapa nombre → evaluador perezoso de residuo máximo"""
    d = tensors.dim
    f = tensors.f_core
    dt = tensors.d_core
    size = f.shape[0]
    eye = np.eye(size)
    basis = basis or generate_basis(d)
    diag = [label - 1 for label in basis.diagonal_indices]

    def larels() -> float:
        stack = basis.stack
        products = np.einsum("iab,jbc->ijac", stack, stack)
        recon = np.einsum("ijk,kab->ijab", dt + 1j * f, stack)
        recon = recon + (2.0 / d) * np.einsum("ij,ab->ijab", eye, np.eye(d))
        return float(np.max(np.abs(products - recon)))

    def antisymmetry() -> float:
        return max(
            float(np.max(np.abs(f + np.transpose(f, (1, 0, 2))))),
            float(np.max(np.abs(f + np.transpose(f, (0, 2, 1))))),
            float(np.max(np.abs(dt - np.transpose(dt, (1, 0, 2))))),
            float(np.max(np.abs(dt - np.transpose(dt, (0, 2, 1))))),
        )

    return {
        "larels": larels,
        "symmetry": antisymmetry,
        "jacobi": lambda: jacobi_like_residual(f, f),
        "jacobi_like": lambda: jacobi_like_residual(f, dt),
        "mac_2_7": lambda: float(np.max(np.abs(np.einsum("iik->k", dt)))),
        "mac_2_14": lambda: float(np.max(np.abs(np.einsum("ijk,ljk->il", dt, f)))),
        "mac_2_12": lambda: float(np.max(np.abs(np.einsum("ijk,ljk->il", f, f) - d * eye))),
        "mac_2_13": lambda: float(np.max(np.abs(
            np.einsum("ijk,ljk->il", dt, dt) - ((d * d - 4.0) / d) * eye))),
        "mac_2_10": lambda: _mac_2_10(f, dt, d),
        "mac_2_15": lambda: float(np.max(np.abs(_cyclic_triple(f, f, f) + (d / 2.0) * f))),
        "mac_2_16": lambda: float(np.max(np.abs(_cyclic_triple(dt, f, f) + (d / 2.0) * dt))),
        "mac_2_17": lambda: float(np.max(np.abs(
            _cyclic_triple(dt, dt, f) - ((d * d - 4.0) / (2.0 * d)) * f))),
        "mac_2_18": lambda: float(np.max(np.abs(
            _cyclic_triple(dt, dt, dt) - ((d * d - 12.0) / (2.0 * d)) * dt))),
        "diagonal_d_sum": lambda: float(np.max(np.abs(
            sum((dt[i, i, :] for i in diag), np.zeros(size))))),
        "diagonal_f_vanishes": lambda: float(np.max(np.abs(
            f[np.ix_(diag, diag, diag)]))) if diag else 0.0,
    }


def verify_algebra_identities(
    tensors: StructureTensors,
    tolerance: float = 1e-11,
    basis: Optional[GellMannBasis] = None,
    max_workers: Optional[int] = None,
) -> IdentityReport:
    """
    Evalúa en paralelo todas las identidades y reporta el residuo máximo de cada una.
    Las fallas se reportan, no se lanzan.
    """
    checks = identity_checks(tensors, basis)
    workers = max_workers or settings.workers
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {name: pool.submit(fn) for name, fn in checks.items()}
        residuals = {name: future.result() for name, future in futures.items()}

    report = IdentityReport.from_residuals(residuals, tolerance, d=tensors.dim)
    if report.passed:
        logger.info(f"✅ Identidades su({tensors.dim}) verificadas ({len(residuals)} chequeos)")
    else:
        logger.warning(f"⚠️ Identidades su({tensors.dim}) fuera de tolerancia: {report.failed_checks()}")
    return report
