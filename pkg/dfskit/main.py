"""
Punto de entrada de dfskit
Uso: python -m dfskit.main <comando> [opciones]
"""
from __future__ import annotations

import logging
import sys
from typing import Optional, Sequence, TextIO

from dfskit.api.cli import run
from dfskit.core import config
from dfskit.core.config import settings
from dfskit.core.exceptions import EXIT_USAGE, ValidationException, handle_exception

# Configurar logging (stderr; stdout queda para los artefactos JSON)
logging.basicConfig(
    level=getattr(logging, settings.log_level.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)


def main(argv: Optional[Sequence[str]] = None, stream: Optional[TextIO] = None,
         err: Optional[TextIO] = None) -> int:
    """Ejecuta un comando y retorna su código de salida (0, 1 o 2)"""
    try:
        if config.settings_error is not None:
            raise ValidationException(
                "Variables de entorno DFSKIT_ inválidas",
                details={"errors": config.settings_error.errors(include_url=False, include_context=False)}
            )
        return run(argv, stream)
    except SystemExit as exc:
        # argparse termina con 2 en errores de uso y 0 con --help
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
        return code
    except Exception as exc:
        return handle_exception(exc, err)


if __name__ == "__main__":
    sys.exit(main())
