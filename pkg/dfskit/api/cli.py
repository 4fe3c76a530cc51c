"""
Comandos de línea: basis, verify, search, gate, simulate, encoding
Cada comando retorna su código de salida; las fallas de verificación escriben el
reporte y luego lanzan VerificationFailure
"""
from __future__ import annotations

import argparse
import logging
from typing import Callable, Dict, List, Optional, Sequence, TextIO

import numpy as np
from pydantic import ValidationError

from dfskit.core.exceptions import EXIT_OK, ValidationException, VerificationFailure
from dfskit.schemas.gate import SITES_PER_KIND, GateKind, GateSpec
from dfskit.schemas.run_config import RunConfig
from dfskit.services.compat_search import (
    COMMUTE_TOL,
    build_constraint_system,
    commutant_basis,
    known_coefficients,
    match_against_known,
    verify_known,
)
from dfskit.services.dfs_encoding import encode, generator_block_reports, octet_states
from dfskit.services.json_exporter import JSONExporter
from dfskit.services.logical_gates import XConvention, build_gate, verify_commutation_table
from dfskit.services.noise_sim import run_trajectory, verify_n_qudit_compat
from dfskit.services.su_algebra import generate_basis, structure_constants, verify_algebra_identities

logger = logging.getLogger(__name__)

FULL_SEARCH_MAX_D = 3


# ===============================
# PARSEO DE ARGUMENTOS
# ===============================

def parse_complex(text: str) -> complex:
    """Literal complejo: '0.6', '0.8j', '1+2i'"""
    cleaned = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError:
        raise ValidationException(f"Literal complejo inválido: {text}", details={"value": text})


def parse_gauge(text: Optional[str]) -> Optional[List[complex]]:
    """8 literales complejos, o 16 reales leídos como pares (re, im)"""
    if text is None:
        return None
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) == 8:
        return [parse_complex(p) for p in parts]
    if len(parts) == 16:
        values = [float(parse_complex(p).real) for p in parts]
        return [complex(values[2 * j], values[2 * j + 1]) for j in range(8)]
    raise ValidationException(
        "El gauge requiere 8 complejos o 16 reales",
        details={"received": len(parts)}
    )


def _config(args: argparse.Namespace) -> RunConfig:
    try:
        return RunConfig.resolve(
            d=getattr(args, "d", None),
            n=getattr(args, "n", None),
            tolerance=getattr(args, "tol", None),
            seed=getattr(args, "seed", None),
            out=getattr(args, "out", None),
        )
    except ValidationError as exc:
        raise ValidationException("Configuración inválida",
                                  details={"errors": exc.errors(include_url=False, include_context=False)})


# ===============================
# COMANDOS
# ===============================

def cmd_basis(args: argparse.Namespace, stream: Optional[TextIO] = None) -> int:
    """Base de Gell-Mann y tensores f, d"""
    if args.d is not None and args.d < 2:
        raise ValidationException("La dimensión debe ser d >= 2", details={"d": args.d})
    config = _config(args)
    basis = generate_basis(config.d)
    tensors = structure_constants(basis)
    JSONExporter.write(JSONExporter.basis_file(basis, tensors), config.out, stream)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, stream: Optional[TextIO] = None) -> int:
    """Identidades del álgebra, tabla de conmutación y barrido de n qudits"""
    config = _config(args)
    basis = generate_basis(config.d)
    tensors = structure_constants(basis)

    identities = verify_algebra_identities(tensors, config.tolerance, basis=basis)
    table = verify_commutation_table(basis, config.tolerance)
    compat = verify_n_qudit_compat(basis, config.n, config.tolerance)

    passed = identities.passed and table.passed and compat.passed
    JSONExporter.write(
        {"d": config.d, "n": config.n, "pass": passed,
         "identities": identities, "commutation": table, "compat": compat},
        config.out, stream,
    )
    if not passed:
        failed: Dict[str, float] = {}
        for report in (identities, table, compat):
            failed.update(report.failed_checks())
        raise VerificationFailure("verify", failed)
    return EXIT_OK


def cmd_search(args: argparse.Namespace, stream: Optional[TextIO] = None) -> int:
    """Conmutante completo (d <= 3 por defecto) o verificación de los conocidos"""
    config = _config(args)
    mode = args.mode or ("full" if config.d <= FULL_SEARCH_MAX_D else "verify")
    basis = generate_basis(config.d)
    tensors = structure_constants(basis)
    system = build_constraint_system(basis, config.n, tensors=tensors)

    if mode == "full":
        found = commutant_basis(system)
        report = match_against_known(found, known_coefficients(basis, config.n, tensors=tensors),
                                     mode=mode, tolerance=COMMUTE_TOL)
    else:
        report = verify_known(basis, config.n, system=system, tolerance=COMMUTE_TOL)

    JSONExporter.write(report, config.out, stream)
    if not report.passed:
        labeled = report.known_residuals or {f"element_{k}": r for k, r in enumerate(report.residuals)}
        failed = {name: r for name, r in labeled.items() if r > report.tolerance}
        raise VerificationFailure("search", failed)
    return EXIT_OK


def cmd_gate(args: argparse.Namespace, stream: Optional[TextIO] = None) -> int:
    """Matriz unitaria de una compuerta"""
    kind = GateKind(args.kind)
    d = args.d if args.d is not None else _config(argparse.Namespace()).d
    n = args.n if args.n is not None else SITES_PER_KIND[kind]
    try:
        spec = GateSpec(kind=kind, d=d, n=n, t=args.t if args.t is not None else np.pi / 4,
                        sites=args.sites or [])
    except ValidationError as exc:
        raise ValidationException("Especificación de compuerta inválida",
                                  details={"errors": exc.errors(include_url=False, include_context=False)})

    convention = XConvention(args.convention)
    matrix = build_gate(generate_basis(spec.d), spec, convention).matrix
    out = _config(args).out
    JSONExporter.write(
        JSONExporter.gate_export(spec, matrix, convention.value if kind is GateKind.XBAR else None),
        out, stream,
    )
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, stream: Optional[TextIO] = None) -> int:
    """Trayectoria de ruido colectivo sobre un estado codificado (JSONL)"""
    config = _config(args)
    if args.steps < 0:
        raise ValidationException("steps debe ser >= 0", details={"steps": args.steps})
    state = encode(parse_complex(args.a), parse_complex(args.b), parse_gauge(args.gauge))
    trajectory = run_trajectory(state, args.steps, config.seed, control_step=args.control_step)
    JSONExporter.write_lines(trajectory.record, config.out, stream)

    if args.control_step is None:
        drift = trajectory.max_population_drift
        if trajectory.max_leak > config.tolerance or drift > config.tolerance:
            raise VerificationFailure("simulate", {"leak": trajectory.max_leak, "population_drift": drift})
    return EXIT_OK


def cmd_encoding(args: argparse.Namespace, stream: Optional[TextIO] = None) -> int:
    """Vectores de la codificación y reportes de bloque de cada S_α"""
    config = _config(args)
    basis = generate_basis(3)
    encoding = octet_states(basis)
    reports = generator_block_reports(basis, encoding)
    JSONExporter.write(
        {"encoding": JSONExporter.encoding_export(encoding),
         "block_reports": [JSONExporter.block_report_export(r) for r in reports]},
        config.out, stream,
    )
    worst = max(max(r.cross_block_max, r.within_block_difference, r.leakage_max) for r in reports)
    if worst > config.tolerance:
        raise VerificationFailure("encoding", {"block_structure": worst})
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace, Optional[TextIO]], int]] = {
    "basis": cmd_basis,
    "verify": cmd_verify,
    "search": cmd_search,
    "gate": cmd_gate,
    "simulate": cmd_simulate,
    "encoding": cmd_encoding,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dfskit",
        description="Bases SU(d), Hamiltonianos compatibles con ruido colectivo y compuertas lógicas de qudits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, with_n: bool = True) -> None:
        p.add_argument("--d", type=int, default=None, help="Dimensión del qudit (DFSKIT_D)")
        if with_n:
            p.add_argument("--n", type=int, default=None, help="Número de qudits (DFSKIT_N)")
        p.add_argument("--tol", type=float, default=None, help="Tolerancia (DFSKIT_TOL)")
        p.add_argument("--out", default=None, help="Archivo de salida; stdout si falta")

    common(sub.add_parser("basis", help="Exporta base y tensores de estructura"), with_n=False)
    common(sub.add_parser("verify", help="Identidades, tabla de conmutación y barrido de compatibilidad"))

    search = sub.add_parser("search", help="Búsqueda del conmutante")
    common(search)
    search.add_argument("--mode", choices=["full", "verify"], default=None)

    gate = sub.add_parser("gate", help="Matriz de una compuerta")
    common(gate)
    gate.add_argument("--kind", required=True, choices=[k.value for k in GateKind])
    gate.add_argument("--t", type=float, default=None, help="Parámetro de evolución (π/4 por defecto)")
    gate.add_argument("--sites", type=int, nargs="+", default=None)
    gate.add_argument("--convention", choices=[c.value for c in XConvention], default=XConvention.POSITIVE.value)

    simulate = sub.add_parser("simulate", help="Trayectoria de ruido colectivo (JSONL)")
    simulate.add_argument("--steps", type=int, default=100)
    simulate.add_argument("--seed", type=int, default=None)
    simulate.add_argument("--a", default="1")
    simulate.add_argument("--b", default="0")
    simulate.add_argument("--gauge", default=None, help="8 complejos o 16 reales separados por comas")
    simulate.add_argument("--control-step", dest="control_step", type=int, default=None)
    simulate.add_argument("--tol", type=float, default=None)
    simulate.add_argument("--out", default=None)

    common(sub.add_parser("encoding", help="Exporta la codificación por octetos"), with_n=False)
    return parser


def run(argv: Optional[Sequence[str]] = None, stream: Optional[TextIO] = None) -> int:
    """Parsea y despacha; las excepciones se traducen en main"""
    args = build_parser().parse_args(argv)
    logger.debug(f"▶️ Comando {args.command}")
    return COMMANDS[args.command](args, stream)
