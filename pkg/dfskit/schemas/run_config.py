"""
Configuración resuelta por comando (flag > entorno > defecto)
"""
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, Field

from dfskit.core.config import Settings, settings


class RunConfig(BaseModel):
    d: int = Field(default=3, ge=2)
    n: int = Field(default=3, ge=2)
    tolerance: float = Field(default=1e-10, gt=0)
    seed: int = Field(default=0, ge=0)
    out: Optional[Path] = None

    @classmethod
    def resolve(
        cls,
        d: Optional[int] = None,
        n: Optional[int] = None,
        tolerance: Optional[float] = None,
        seed: Optional[int] = None,
        out: Optional[Any] = None,
        source: Optional[Settings] = None,
    ) -> "RunConfig":
        """Un flag explícito gana; si falta se usa DFSKIT_* o el valor por defecto"""
        source = source or settings
        return cls(
            d=source.d if d is None else d,
            n=source.n if n is None else n,
            tolerance=source.tol if tolerance is None else tolerance,
            seed=source.seed if seed is None else seed,
            out=Path(out) if out else None,
        )
