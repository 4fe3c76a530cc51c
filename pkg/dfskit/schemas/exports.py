"""
Esquemas de exportación JSON
Los kets computacionales y las etiquetas de sitio son 0-based; las etiquetas de
generador van de 1 a d²−1 (0 es la identidad)
"""
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field

ComplexPair = Tuple[float, float]
MatrixPayload = List[List[ComplexPair]]


class BasisExport(BaseModel):
    d: int = Field(..., ge=2)
    matrices: List[MatrixPayload]
    diagonal_indices: List[int]


class TensorsExport(BaseModel):
    d: int = Field(..., ge=2)
    f: List[Tuple[int, int, int, float]]
    dsym: List[Tuple[int, int, int, float]]


class BasisFileExport(BaseModel):
    """Salida de `basis`: base y tensores en un solo documento"""
    basis: BasisExport
    tensors: TensorsExport


class VectorExport(BaseModel):
    label: str
    block: str          # octet0 | octet1 | singlet | decuplet
    amplitudes: List[ComplexPair]


class EncodingExport(BaseModel):
    d: int = 3
    n: int = 3
    vectors: List[VectorExport]


class BlockReportExport(BaseModel):
    block0: MatrixPayload
    block1: MatrixPayload
    cross_block_max: float
    within_block_difference: float
    leakage_max: float


class GateExport(BaseModel):
    kind: str
    d: int
    n: int
    t: float
    sites: List[int]
    convention: Optional[str] = None
    matrix: MatrixPayload


class TrajectoryStep(BaseModel):
    """Una línea del JSONL de trayectoria"""
    step: int = Field(..., ge=0)
    p0: float
    p1: float
    leak: float
    gauge_overlap: Optional[float] = None
