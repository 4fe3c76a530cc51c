"""
Sistema centralizado de manejo de excepciones
Cada excepción lleva su código de salida para la CLI (0 ok, 1 verificación, 2 uso)
"""
from __future__ import annotations

import json
import logging
import sys
from datetime import datetime
from typing import Any, Callable, Dict, Optional, TextIO, Type

from dfskit.models.responses import ErrorResponse

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2


class DfskitException(Exception):
    """Excepción base de dfskit"""

    def __init__(
        self,
        message: str,
        exit_code: int = EXIT_VERIFICATION_FAILED,
        error_code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None
    ):
        self.message = message
        self.exit_code = exit_code
        self.error_code = error_code or self.__class__.__name__
        self.details = details or {}
        super().__init__(self.message)


class ValidationException(DfskitException):
    """Argumentos inválidos (dimensiones, sitios, índices, normalización)"""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(
            message=message,
            exit_code=EXIT_USAGE,
            error_code="VALIDATION_ERROR",
            details=details
        )


class DimensionMismatch(DfskitException):
    """Operadores con dimensiones incompatibles"""

    def __init__(self, operation: str, expected: int, received: int):
        super().__init__(
            message=f"Dimensión incompatible en {operation}: se esperaba {expected}, se recibió {received}",
            exit_code=EXIT_USAGE,
            error_code="DIMENSION_MISMATCH",
            details={"operation": operation, "expected": expected, "received": received}
        )


class NonHermitianError(DfskitException):
    """Entrada que debía ser hermítica y no lo es"""

    def __init__(self, operation: str, deviation: float, tolerance: float):
        super().__init__(
            message=f"Operador no hermítico en {operation}: desviación {deviation:.3e} > {tolerance:.1e}",
            exit_code=EXIT_USAGE,
            error_code="NON_HERMITIAN",
            details={"operation": operation, "deviation": deviation, "tolerance": tolerance}
        )


class StructureConstantError(DfskitException):
    """Constantes de estructura con parte imaginaria (base defectuosa)"""

    def __init__(self, tensor: str, residue: float):
        super().__init__(
            message=f"Residuo imaginario {residue:.3e} en el tensor {tensor}",
            exit_code=EXIT_VERIFICATION_FAILED,
            error_code="STRUCTURE_CONSTANT_ERROR",
            details={"tensor": tensor, "residue": residue}
        )


class ResourceLimitExceeded(DfskitException):
    """Dimensión de Hilbert por encima del límite del camino denso"""

    def __init__(self, operation: str, dimension: int, limit: int):
        super().__init__(
            message=f"{operation}: dimensión {dimension} supera el límite denso {limit}",
            exit_code=EXIT_USAGE,
            error_code="RESOURCE_LIMIT",
            details={"operation": operation, "dimension": dimension, "limit": limit}
        )


class VerificationFailure(DfskitException):
    """Un reporte de verificación no pasó"""

    def __init__(self, command: str, failed_checks: Dict[str, float]):
        super().__init__(
            message=f"Verificación fallida en '{command}': {len(failed_checks)} chequeos fuera de tolerancia",
            exit_code=EXIT_VERIFICATION_FAILED,
            error_code="VERIFICATION_FAILED",
            details={"command": command, "failed_checks": failed_checks}
        )


# ===============================
# MANEJADORES
# ===============================

def _emit(exc: DfskitException, stream: TextIO, message: Optional[str] = None) -> int:
    response = ErrorResponse(
        message=message or exc.message,
        error_code=exc.error_code,
        error_details=json.loads(json.dumps(exc.details, default=str)),
        timestamp=datetime.now()
    )
    stream.write(response.model_dump_json() + "\n")
    return exc.exit_code


def validation_exception_handler(exc: DfskitException, stream: TextIO) -> int:
    """Errores de uso: advertencia y código 2"""
    logger.warning(f"Validation error: {exc.message}", extra={"details": exc.details})
    return _emit(exc, stream)


def numerical_exception_handler(exc: DfskitException, stream: TextIO) -> int:
    """Fallos numéricos o de verificación"""
    logger.error(f"Numerical error: {exc.message}", extra={"details": exc.details})
    return _emit(exc, stream)


_HANDLERS: Dict[Type[DfskitException], Callable[[DfskitException, TextIO], int]] = {
    ValidationException: validation_exception_handler,
    DimensionMismatch: validation_exception_handler,
    NonHermitianError: validation_exception_handler,
    ResourceLimitExceeded: validation_exception_handler,
    StructureConstantError: numerical_exception_handler,
    VerificationFailure: numerical_exception_handler,
}


def handle_exception(exc: BaseException, stream: Optional[TextIO] = None) -> int:
    """Traduce una excepción a código de salida y emite un ErrorResponse en stderr"""
    stream = stream or sys.stderr
    if isinstance(exc, DfskitException):
        handler = _HANDLERS.get(type(exc), numerical_exception_handler)
        return handler(exc, stream)

    logger.error(f"Unhandled exception: {str(exc)}", exc_info=True)
    response = ErrorResponse(
        message="Error interno",
        error_code="INTERNAL_ERROR",
        error_details={"type": type(exc).__name__},
        timestamp=datetime.now()
    )
    stream.write(response.model_dump_json() + "\n")
    return EXIT_VERIFICATION_FAILED
