"""
Servicio de exportación a JSON / JSONL
Serialización determinista: orden de campos fijo y flotantes con 17 dígitos
significativos, para que dos corridas con la misma semilla sean idénticas byte a byte
"""
from __future__ import annotations

import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Iterable, List, Optional, TextIO

import numpy as np
from pydantic import BaseModel

from dfskit.schemas.exports import (
    BasisExport,
    BasisFileExport,
    BlockReportExport,
    EncodingExport,
    GateExport,
    MatrixPayload,
    TensorsExport,
    VectorExport,
)

logger = logging.getLogger(__name__)


def _format_float(value: float) -> str:
    if math.isnan(value) or math.isinf(value):
        return "null"
    text = format(value, ".17g")
    return "0" if text == "-0" else text


def _encode(obj: Any) -> str:
    """Serializa recursivamente; los complejos se escriben como [re, im]"""
    if isinstance(obj, BaseModel):
        return _encode(obj.model_dump(mode="python", by_alias=True))
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode([float(obj.real), float(obj.imag)])
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, Path):
        return json.dumps(str(obj), ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(key), ensure_ascii=False)}: {_encode(value)}" for key, value in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(item) for item in obj) + "]"
    raise TypeError(f"Tipo no serializable: {type(obj).__name__}")


def matrix_payload(matrix: np.ndarray) -> MatrixPayload:
    """Matriz compleja fila por fila como pares [re, im]"""
    return [[(float(z.real), float(z.imag)) for z in row] for row in np.asarray(matrix, dtype=complex)]


class JSONExporter:
    """
    Exportador de artefactos numéricos a JSON y JSON Lines
    """

    @staticmethod
    def dumps(payload: Any) -> str:
        return _encode(payload)

    @staticmethod
    def write(payload: Any, out: Optional[Path] = None, stream: Optional[TextIO] = None) -> None:
        """
        Escribe un documento JSON

        Args:
            payload: modelo pydantic, dict o lista
            out: archivo destino; si falta se usa stdout
        """
        text = _encode(payload) + "\n"
        if out is not None:
            Path(out).write_text(text, encoding="utf-8")
            logger.info(f"💾 JSON escrito en {out} ({len(text)} bytes)")
        else:
            (stream or sys.stdout).write(text)

    @staticmethod
    def write_lines(records: Iterable[Any], out: Optional[Path] = None, stream: Optional[TextIO] = None) -> int:
        """Un objeto por línea; retorna el número de líneas"""
        lines: List[str] = [_encode(record) for record in records]
        text = "".join(line + "\n" for line in lines)
        if out is not None:
            Path(out).write_text(text, encoding="utf-8")
            logger.info(f"💾 JSONL escrito en {out} ({len(lines)} registros)")
        else:
            (stream or sys.stdout).write(text)
        return len(lines)

    # ===============================
    # ARTEFACTOS
    # ===============================

    @staticmethod
    def basis_export(basis) -> BasisExport:
        return BasisExport(
            d=basis.dim,
            matrices=[matrix_payload(m) for m in basis.matrices],
            diagonal_indices=list(basis.diagonal_indices),
        )

    @staticmethod
    def tensors_export(tensors) -> TensorsExport:
        return TensorsExport(
            d=tensors.dim,
            f=[(i, j, k, v) for (i, j, k), v in sorted(tensors.f.items())],
            dsym=[(i, j, k, v) for (i, j, k), v in sorted(tensors.dsym.items())],
        )

    @staticmethod
    def basis_file(basis, tensors) -> BasisFileExport:
        return BasisFileExport(
            basis=JSONExporter.basis_export(basis),
            tensors=JSONExporter.tensors_export(tensors),
        )

    @staticmethod
    def encoding_export(encoding) -> EncodingExport:
        vectors = [
            VectorExport(label=label, block=block, amplitudes=[(float(z.real), float(z.imag)) for z in vec])
            for label, block, vec in encoding.labeled_vectors()
        ]
        return EncodingExport(vectors=vectors)

    @staticmethod
    def block_report_export(report) -> BlockReportExport:
        return BlockReportExport(
            block0=matrix_payload(report.block0),
            block1=matrix_payload(report.block1),
            cross_block_max=report.cross_block_max,
            within_block_difference=report.within_block_difference,
            leakage_max=report.leakage_max,
        )

    @staticmethod
    def gate_export(spec, matrix: np.ndarray, convention: Optional[str] = None) -> GateExport:
        return GateExport(
            kind=spec.kind.value,
            d=spec.d,
            n=spec.n,
            t=spec.t,
            sites=list(spec.sites),
            convention=convention,
            matrix=matrix_payload(matrix),
        )
