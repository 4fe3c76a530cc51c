"""
Modelos de reporte consistentes para servicios y CLI
"""
from __future__ import annotations

from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, computed_field


class StatusEnum(str, Enum):
    """Estados posibles de un reporte"""
    SUCCESS = "success"
    ERROR = "error"
    WARNING = "warning"


class BaseResponse(BaseModel):
    """Respuesta base para todos los reportes"""
    model_config = ConfigDict(populate_by_name=True)

    status: StatusEnum = Field(default=StatusEnum.SUCCESS)
    message: str = Field(default="Operación exitosa")


class ErrorResponse(BaseResponse):
    """Respuesta para errores (solo se escribe en stderr)"""
    status: StatusEnum = Field(default=StatusEnum.ERROR)
    timestamp: datetime = Field(default_factory=datetime.now)
    error_code: Optional[str] = Field(default=None)
    error_details: Optional[Dict[str, Any]] = Field(default=None)


class VerificationReport(BaseResponse):
    """Residuos máximos por chequeo y veredicto global"""
    residuals: Dict[str, float] = Field(default_factory=dict)
    tolerance: float = Field(..., gt=0)
    passed: bool = Field(default=True, alias="pass")

    @classmethod
    def from_residuals(cls, residuals: Dict[str, float], tolerance: float, **extra: Any):
        """Construye el reporte; pass es verdadero sii todo residuo <= tolerancia"""
        ordered = {name: float(residuals[name]) for name in sorted(residuals)}
        passed = all(value <= tolerance for value in ordered.values())
        return cls(
            residuals=ordered,
            tolerance=tolerance,
            passed=passed,
            status=StatusEnum.SUCCESS if passed else StatusEnum.ERROR,
            message="Todos los chequeos dentro de tolerancia" if passed else "Chequeos fuera de tolerancia",
            **extra
        )

    def failed_checks(self) -> Dict[str, float]:
        return {name: value for name, value in self.residuals.items() if value > self.tolerance}


class IdentityReport(VerificationReport):
    """Identidades del álgebra su(d)"""
    d: int = Field(..., ge=2)


class CommutationReport(VerificationReport):
    """Tabla de conmutación e identidades de producto para n=3"""
    d: int = Field(..., ge=2)


class CompatReport(VerificationReport):
    """Barrido de compatibilidad con errores colectivos en n qudits"""
    d: int = Field(..., ge=2)
    n: int = Field(..., ge=2)
    checks: int = Field(default=0, description="Número de conmutadores evaluados")


class DecompositionReport(BaseResponse):
    """Resultado de la búsqueda del conmutante y su proyección sobre Hamiltonianos conocidos"""
    d: int = Field(..., ge=2)
    n: int = Field(..., ge=2)
    mode: str = Field(default="full")
    nullspace_dim: Optional[int] = Field(default=None)
    residuals: List[float] = Field(default_factory=list)
    decomposition: List[List[Tuple[str, float]]] = Field(default_factory=list)
    change_of_basis: List[List[float]] = Field(default_factory=list)
    known_names: List[str] = Field(default_factory=list)
    known_residuals: Dict[str, float] = Field(default_factory=dict, description="max |[H, S_α]| por Hamiltoniano conocido (modo verify)")
    spectral_gap: Optional[float] = Field(default=None)
    ill_conditioned: bool = Field(default=False)
    tolerance: float = Field(default=1e-9, gt=0)

    @computed_field(alias="pass")
    @property
    def passed(self) -> bool:
        return all(value <= self.tolerance for value in self.residuals)
