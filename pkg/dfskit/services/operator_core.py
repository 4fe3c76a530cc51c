"""
🔧 Núcleo de operadores
Operadores densos sobre (C^d)^⊗n, productos tensoriales de la base, expansión en
coeficientes, exponenciales y muestreo de unitarios de Haar
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from dfskit.core.config import settings
from dfskit.core.exceptions import (
    DimensionMismatch,
    NonHermitianError,
    ResourceLimitExceeded,
    ValidationException,
)
from dfskit.services.su_algebra import GellMannBasis

logger = logging.getLogger(__name__)

Scalar = Union[int, float, complex]


# ===============================
# OPERADOR
# ===============================

@dataclass(frozen=True, eq=False)
class Operator:
    """Matriz compleja d^n × d^n junto con (d, n)"""
    matrix: np.ndarray
    d: int
    n: int

    # escalares numpy delegan en __rmul__
    __array_ufunc__ = None

    def __post_init__(self):
        dim = self.d ** self.n
        if self.matrix.shape != (dim, dim):
            raise DimensionMismatch("Operator", dim, self.matrix.shape[0])

    @classmethod
    def of(cls, matrix: np.ndarray, d: int, n: int) -> "Operator":
        return cls(np.asarray(matrix, dtype=complex), d, n)

    @classmethod
    def identity(cls, d: int, n: int) -> "Operator":
        return cls(np.eye(d ** n, dtype=complex), d, n)

    @property
    def dim(self) -> int:
        return self.d ** self.n

    def _check(self, other: "Operator", operation: str) -> None:
        if (other.d, other.n) != (self.d, self.n):
            raise DimensionMismatch(operation, self.dim, other.dim)

    def __add__(self, other: "Operator") -> "Operator":
        self._check(other, "add")
        return Operator(self.matrix + other.matrix, self.d, self.n)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check(other, "sub")
        return Operator(self.matrix - other.matrix, self.d, self.n)

    def __neg__(self) -> "Operator":
        return Operator(-self.matrix, self.d, self.n)

    def __mul__(self, scalar: Scalar) -> "Operator":
        return Operator(scalar * self.matrix, self.d, self.n)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Scalar) -> "Operator":
        return Operator(self.matrix / scalar, self.d, self.n)

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check(other, "matmul")
        return Operator(self.matrix @ other.matrix, self.d, self.n)

    def dag(self) -> "Operator":
        return Operator(self.matrix.conj().T, self.d, self.n)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def norm(self) -> float:
        """Máximo módulo de entrada"""
        return float(np.max(np.abs(self.matrix))) if self.matrix.size else 0.0

    def hermiticity_deviation(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return self.hermiticity_deviation() <= tol

    def is_unitary(self, tol: float = 1e-10) -> bool:
        return float(np.max(np.abs(self.matrix.conj().T @ self.matrix - np.eye(self.dim)))) <= tol

    def apply(self, state: np.ndarray) -> np.ndarray:
        if state.shape[0] != self.dim:
            raise DimensionMismatch("apply", self.dim, state.shape[0])
        return self.matrix @ state


def commutator(a: Operator, b: Operator) -> Operator:
    return a @ b - b @ a


def distance(a: Operator, b: Operator) -> float:
    """max |a − b| entrada a entrada"""
    return (a - b).norm()


def kron(*operators: Operator) -> Operator:
    """Producto tensorial en el orden de sitios dado"""
    if not operators:
        raise ValidationException("kron requiere al menos un operador")
    d = operators[0].d
    for op in operators[1:]:
        if op.d != d:
            raise DimensionMismatch("kron", d, op.d)
    matrix = reduce(np.kron, (op.matrix for op in operators))
    return Operator(matrix, d, sum(op.n for op in operators))


def kron_power(op: Operator, n: int) -> Operator:
    """op^⊗n"""
    return kron(*([op] * n))


def expm_hermitian(h: Operator, t: float) -> Operator:
    """exp(−i t H) por descomposición espectral; falla si H no es hermítico"""
    deviation = h.hermiticity_deviation()
    if deviation > 1e-10:
        raise NonHermitianError("expm_hermitian", deviation, 1e-10)
    hermitian = 0.5 * (h.matrix + h.matrix.conj().T)
    eigvals, eigvecs = linalg.eigh(hermitian)
    phases = np.exp(-1j * t * eigvals)
    return Operator((eigvecs * phases) @ eigvecs.conj().T, h.d, h.n)


# ===============================
# TUPLAS μ Y COEFICIENTES
# ===============================

def mu(basis: GellMannBasis, labels: Sequence[int]) -> Operator:
    """μ_b = λ_{b_1} ⊗ ... ⊗ λ_{b_n}, con la etiqueta 0 como identidad"""
    if not labels:
        raise ValidationException("La tupla μ no puede ser vacía")
    factors = [Operator(basis.element(label).copy(), basis.dim, 1) for label in labels]
    return kron(*factors)


def _require_dense(d: int, n: int, operation: str) -> None:
    dim = d ** n
    if dim > settings.dense_limit:
        raise ResourceLimitExceeded(operation, dim, settings.dense_limit)


@dataclass(frozen=True, eq=False)
class CoeffTensor:
    """
    Tensor real de forma (d²,)*n con a_b = Tr(H μ_b) / Π_s (d si b_s = 0, si no 2).
    El índice 0 en cada eje corresponde a la identidad.
    """
    values: np.ndarray
    d: int
    n: int

    def __getitem__(self, labels: Tuple[int, ...]) -> float:
        return float(self.values[tuple(labels)])

    def support(self, tol: float = 1e-12) -> List[Tuple[Tuple[int, ...], float]]:
        """Tuplas con coeficiente no nulo, en orden lexicográfico"""
        idx = np.argwhere(np.abs(self.values) > tol)
        return [(tuple(int(i) for i in row), float(self.values[tuple(row)])) for row in idx]

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)


def trace_norms(d: int, n: int) -> np.ndarray:
    per_site = np.full(d * d, 2.0)
    per_site[0] = float(d)
    return reduce(np.multiply.outer, [per_site] * n)


def coeff_expand(op: Operator, basis: GellMannBasis, tol: float = 1e-10) -> CoeffTensor:
    """
    Coeficientes de H en la base {μ_b}. H debe ser hermítico; los coeficientes son
    reales salvo residuo numérico, que se descarta.
    """
    if basis.dim != op.d:
        raise DimensionMismatch("coeff_expand", basis.dim, op.d)
    deviation = op.hermiticity_deviation()
    if deviation > tol:
        raise NonHermitianError("coeff_expand", deviation, tol)
    _require_dense(op.d, op.n, "coeff_expand")

    d, n = op.d, op.n
    # Tr(H μ_b): se contrae cada par (fila_s, columna_s) con λ_{b_s}^T
    t = op.matrix.reshape((d,) * (2 * n))
    full = basis.full_stack
    for remaining in range(n, 0, -1):
        # los ejes de sitio restantes quedan al frente; los índices b al final
        t = np.tensordot(t, full, axes=([0, remaining], [2, 1]))
    values = np.real(t) / trace_norms(d, n)
    return CoeffTensor(values=values, d=d, n=n)


def reconstruct(tensor: CoeffTensor, basis: GellMannBasis) -> Operator:
    """H = Σ_b a_b μ_b"""
    if basis.dim != tensor.d:
        raise DimensionMismatch("reconstruct", basis.dim, tensor.d)
    d, n = tensor.d, tensor.n
    _require_dense(d, n, "reconstruct")
    t = tensor.values.astype(complex)
    full = basis.full_stack
    for _ in range(n):
        # contrae el primer índice b; añade (fila, columna) al final
        t = np.tensordot(t, full, axes=([0], [0]))
    # orden actual: r_1, c_1, r_2, c_2, ... → r_1..r_n, c_1..c_n
    perm = [2 * s for s in range(n)] + [2 * s + 1 for s in range(n)]
    matrix = np.transpose(t, perm).reshape(d ** n, d ** n)
    return Operator(matrix, d, n)


def coeff_inner(a: CoeffTensor, b: CoeffTensor) -> float:
    """⟨A,B⟩ = Tr(AB)/d^n = Σ_b w_b a_b b_b / d^n con w_b = Π_s (d si b_s = 0, si no 2)"""
    if (a.d, a.n) != (b.d, b.n):
        raise DimensionMismatch("coeff_inner", a.d ** a.n, b.d ** b.n)
    weights = trace_norms(a.d, a.n)
    return float(np.sum(weights * a.values * b.values) / a.d ** a.n)


# ===============================
# OPERADORES SOBRE SITIOS
# ===============================

def embed(op: Operator, sites: Sequence[int], n: int) -> Operator:
    """
    Coloca un operador de k sitios sobre `sites` dentro de n sitios (identidad en
    el resto). Los sitios se cuentan desde 0.
    """
    sites = list(sites)
    d, k = op.d, op.n
    if len(sites) != k:
        raise DimensionMismatch("embed", k, len(sites))
    if len(set(sites)) != k or any(s < 0 or s >= n for s in sites):
        raise ValidationException("Sitios inválidos para embed", details={"sites": sites, "n": n})

    rest = [s for s in range(n) if s not in sites]
    full = np.kron(op.matrix, np.eye(d ** len(rest), dtype=complex))
    order = sites + rest
    perm = [order.index(s) for s in range(n)]
    t = full.reshape((d,) * (2 * n))
    t = np.transpose(t, perm + [n + p for p in perm])
    return Operator(t.reshape(d ** n, d ** n), d, n)


def site_operator(matrix: np.ndarray, site: int, n: int) -> Operator:
    """Matriz d×d actuando sobre un único sitio"""
    d = matrix.shape[0]
    return embed(Operator(np.asarray(matrix, dtype=complex), d, 1), [site], n)


def permutation_operator(perm: Sequence[int], d: int) -> Operator:
    """
    P_π |i_0 ... i_{n−1}⟩ = |j⟩ con j_{π(s)} = i_s: el contenido del sitio s se
    mueve al sitio π(s).
    """
    perm = list(perm)
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValidationException("Permutación inválida", details={"perm": perm})
    dim = d ** n
    matrix = np.zeros((dim, dim), dtype=complex)
    for digits in itertools.product(range(d), repeat=n):
        target = [0] * n
        for s, value in enumerate(digits):
            target[perm[s]] = value
        src = int(np.ravel_multi_index(digits, (d,) * n))
        dst = int(np.ravel_multi_index(target, (d,) * n))
        matrix[dst, src] = 1.0
    return Operator(matrix, d, n)


def transposition(p: int, q: int, d: int, n: int) -> Operator:
    """P_pq: intercambia los sitios p y q"""
    if p == q:
        raise ValidationException("Una transposición requiere sitios distintos", details={"p": p, "q": q})
    perm = list(range(n))
    perm[p], perm[q] = q, p
    return permutation_operator(perm, d)


def basis_ket(digits: Iterable[int], d: int) -> np.ndarray:
    """|i_0 i_1 ...⟩ en la base computacional"""
    digits = tuple(digits)
    vec = np.zeros(d ** len(digits), dtype=complex)
    vec[int(np.ravel_multi_index(digits, (d,) * len(digits)))] = 1.0
    return vec


# ===============================
# MUESTREO DE HAAR
# ===============================

def haar_unitary(d: int, seed: Optional[int] = None, rng: Optional[np.random.Generator] = None) -> Operator:
    """
    Unitario de Haar d×d: QR de una matriz gaussiana compleja con corrección de
    fase por la diagonal de R. Requiere una semilla o un generador explícito.
    """
    if d < 2:
        raise ValidationException("La dimensión debe ser d >= 2", details={"d": d})
    if rng is None:
        if seed is None:
            raise ValidationException("haar_unitary requiere seed o rng explícito")
        rng = np.random.default_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = linalg.qr(z)
    diag = np.diagonal(r)
    phases = diag / np.abs(diag)
    return Operator(q * phases[None, :], d, 1)
