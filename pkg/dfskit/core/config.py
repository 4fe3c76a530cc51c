"""
Configuración centralizada de dfskit
Variables de entorno con prefijo DFSKIT_ y soporte para archivo .env
"""
from __future__ import annotations

import logging
from typing import Optional, Tuple

from pydantic import Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)

# ===============================
# PERFILES POR ENTORNO
# ===============================

# Hilos para verificaciones en paralelo (identidades, barridos)
WORKERS_BY_ENVIRONMENT = {
    "production": 8,
    "testing": 2,
    "development": 4,
}


class Settings(BaseSettings):
    """Parámetros numéricos y de ejecución (flag CLI > entorno > defecto)"""

    model_config = SettingsConfigDict(
        env_prefix="DFSKIT_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    environment: str = Field(default="development")
    log_level: str = Field(default="INFO")

    # Valores por defecto de RunConfig
    tol: float = Field(default=1e-10, gt=0)
    seed: int = Field(default=0, ge=0)
    d: int = Field(default=3, ge=2)
    n: int = Field(default=3, ge=2)

    # Búsqueda del conmutante
    svd_threshold: float = Field(default=1e-9, gt=0)   # relativo a sigma_max
    gap_ratio: float = Field(default=1e3, gt=1)        # brecha espectral mínima aceptable

    # Límite de dimensión para caminos densos (4^5)
    dense_limit: int = Field(default=1024, ge=8)

    max_workers: Optional[int] = Field(default=None, ge=1)

    @property
    def workers(self) -> int:
        """Hilos efectivos: explícito o según el perfil de entorno"""
        if self.max_workers is not None:
            return self.max_workers
        return WORKERS_BY_ENVIRONMENT.get(self.environment, 4)


def load_settings() -> Tuple[Settings, Optional[ValidationError]]:
    """
    Lee el entorno. Con variables inválidas retorna los valores por defecto junto
    al error, que main() reporta como error de uso.
    """
    try:
        return Settings(), None
    except ValidationError as exc:
        logger.warning(f"⚠️ Variables DFSKIT_ inválidas: {exc.error_count()} errores")
        return Settings.model_construct(), exc


settings, settings_error = load_settings()
