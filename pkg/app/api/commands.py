import argparse                 # Interpretação dos argumentos da linha de comando (subcomandos, flags).
import json
import logging
import os
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional

from app.core.config import settings
from app.core.exceptions import InvalidInputError
from app.schemas.report import ReportFormat
from app.schemas.signature import Rho0Export, SignatureFunctionExport
from app.services import ribbon_classifier
from app.services.alex_module import (
    ModuleKind,
    alexander_polynomial,
    ext1_linear_pair,
    lagrangian_metabolizer_pairs,
    lagrangian_set,
    module_type,
)
from app.services.blanchfield import PAIRING_CONVENTION, bl_vanishes_on, blanchfield_matrix
from app.services.knot_io import (
    BraidWord,
    SeifertMatrix,
    alexander_via_burau,
    braid_to_seifert,
    kn_family_name,
    kn_parameter,
    kn_seifert,
    parse_seifert_json,
)
from app.services.laurent import LaurentPoly
from app.services.lt_signature import Rho0Sign, rho0, signature_at, signature_function

Handler = Callable[[argparse.Namespace], str]


# --- Entrada ---

def read_knot(args: argparse.Namespace) -> tuple[SeifertMatrix, Optional[BraidWord]]:
    """
    Lê o nó de 'args.knot': matriz de Seifert em JSON ("[[1, 0], [-1, 1]]"), palavra de
    trança ("braid:-1 -1 -1", ou "-1 -1 -1" depois de '--') ou caminho de arquivo com um dos dois.

    Returns:
        tuple: A matriz de Seifert e, para tranças, a palavra lida.
    """
    text = args.knot
    if os.path.isfile(text):
        try:
            text = Path(text).read_text(encoding="utf-8")
        except (UnicodeDecodeError, OSError) as e:
            logging.error(f"Falha ao ler o arquivo do nó {args.knot}: {e}")
            raise InvalidInputError(f"não foi possível ler {args.knot} como texto UTF-8")
    text = text.strip()
    if text.startswith("["):
        return parse_seifert_json(text), None
    text = text.removeprefix("braid:")  # o prefixo evita que "-1 ..." seja lido como opção
    word = BraidWord.parse(text, args.strands)
    return braid_to_seifert(word), word


def _precision(args: argparse.Namespace) -> int:
    bits = args.precision_bits
    if not 1 <= bits <= settings.MAX_PRECISION_BITS:
        raise InvalidInputError(f"--precision-bits deve estar em [1, {settings.MAX_PRECISION_BITS}], recebido {bits}")
    return bits


def _parse_at(text: str) -> Fraction:
    """
    Converte o valor de '--at' ("1/3", "0.25") num racional.

    Raises:
        InvalidInputError: Se o texto não for um número racional.
    """
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        logging.error(f"Valor de --at inválido {text!r}: {e}")
        raise InvalidInputError(f"--at deve ser um racional como 1/3, recebido {text!r}")


def _dump(data: object) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


# --- Subcomandos ---

def cmd_alex(args: argparse.Namespace) -> str:
    v, word = read_knot(args)
    delta = alexander_polynomial(v)
    data = {"delta": str(delta), "seifert_matrix": v.matrix.to_lists()}
    if word is not None:
        data["delta_burau"] = str(alexander_via_burau(word))
    if args.json:
        return _dump(data)
    lines = [f"Δ = {delta}"] + ([f"Δ (Burau) = {data['delta_burau']}"] if word is not None else [])
    return "\n".join(lines) + "\n"


def cmd_module_type(args: argparse.Namespace) -> str:
    v, _ = read_knot(args)
    facts = module_type(v)
    data = {"delta": str(facts.delta), "kind": facts.kind.value, "generators": [str(g) for g in facts.generators]}
    if args.json:
        return _dump(data)
    gens = ", ".join(data["generators"]) or "-"
    return f"{facts.kind.value} (Δ = {facts.delta}; geradores: {gens})\n"


def cmd_lagrangians(args: argparse.Namespace) -> str:
    v, _ = read_knot(args)
    facts = module_type(v)
    lagrangians = lagrangian_set(facts)
    metabolizers = {}
    if v.size == 2:
        metabolizers = {lag.label: str(m) for lag, m in lagrangian_metabolizer_pairs(v, facts)}
    form = blanchfield_matrix(v)
    data = [
        {
            "label": lag.label,
            "factor": str(lag.factor.polynomial),
            "annihilator": str(lag.annihilator),
            "generator": str(lag.generator),
            "metabolizer": metabolizers.get(lag.label),
            "isotropic": bl_vanishes_on(form, lag),
        }
        for lag in lagrangians
    ]
    if facts.kind is not ModuleKind.OTHER:
        data_ext = str(ext1_linear_pair(lagrangians[0].annihilator, lagrangians[1].annihilator))
    else:
        data_ext = None
    if args.json:
        return _dump({"kind": facts.kind.value, "lagrangians": data, "ext1": data_ext})
    if not data:
        return f"sem lagrangianos (Δ = {facts.delta})\n"
    lines = [
        f"{d['label']}: gerador {d['generator']}, M/P anulado por {d['factor']}"
        + (f", metabolizador {d['metabolizer']}" if d["metabolizer"] else "")
        for d in data
    ]
    return "\n".join(lines + [f"Ext^1 = {data_ext}"]) + "\n"


def cmd_blanchfield(args: argparse.Namespace) -> str:
    v, _ = read_knot(args)
    form = blanchfield_matrix(v)
    entries = [[str(form.entry(i, j)) for j in range(form.size)] for i in range(form.size)]
    if args.json:
        return _dump({"convention": PAIRING_CONVENTION, "denominator": str(form.denominator), "entries": entries})
    return "\n".join(" | ".join(row) for row in entries) + "\n" if entries else "forma vazia\n"


def cmd_signature(args: argparse.Namespace) -> str:
    v, _ = read_knot(args)
    bits = _precision(args)
    if args.at is not None:
        value = signature_at(v, _parse_at(args.at), bits)
        return _dump({"s": args.at, "signature": value}) if args.json else f"σ({args.at}) = {value}\n"
    f = signature_function(v, bits, settings.MAX_WORKERS)
    export = SignatureFunctionExport.from_function(f)
    if args.plot_json:
        try:
            Path(args.plot_json).write_text(export.model_dump_json(indent=2), encoding="utf-8")
        except OSError as e:
            logging.error(f"Falha ao gravar {args.plot_json}: {e}")
            raise InvalidInputError(f"não foi possível gravar --plot-json em {args.plot_json}")
        logging.info(f"Dados de plotagem gravados em {args.plot_json}.")
    if args.json:
        return export.model_dump_json(indent=2) + "\n"
    lines = [f"Δ = {export.delta}"]
    lines += [f"  s em ({a.s_interval[0]}, {a.s_interval[1]}): {a.value}" for a in export.arcs]
    return "\n".join(lines) + "\n"


def cmd_rho0(args: argparse.Namespace) -> str:
    v, _ = read_knot(args)
    result = rho0(v, _precision(args), settings.MAX_WORKERS)
    export = Rho0Export.from_result(result)
    if result.sign is Rho0Sign.UNDETERMINED:
        args.exit_status = 2  # sinal não certificado no teto de precisão
    if args.json:
        return export.model_dump_json(indent=2) + "\n"
    return f"ρ⁰ ∈ [{export.enclosure[0]}, {export.enclosure[1]}] ≈ {export.approx:.6f} ({export.sign.value})\n"


def _render(report, args: argparse.Namespace) -> str:
    fmt = ReportFormat.JSON if args.json else ReportFormat.TEXT
    return ribbon_classifier.report_render(report, fmt).decode("utf-8") + ("\n" if args.json else "")


def cmd_classify(args: argparse.Namespace) -> str:
    v, _ = read_knot(args)
    n = kn_parameter(v)
    if args.builtin:
        if n is None:
            raise InvalidInputError("--builtin exige uma matriz da família K_n ((n, 2), (1, 0))")
        derivs = ribbon_classifier.builtin_derivatives(n)
    else:
        derivs = ribbon_classifier.DerivativeSpec.parse(args.derivative or [])
    knot = kn_family_name(n) if n is not None else None
    report = ribbon_classifier.classify_knot(v, derivs, knot, _precision(args))
    return _render(report, args)


def cmd_kn(args: argparse.Namespace) -> str:
    if args.classify:
        report = ribbon_classifier.classify_kn(args.n, precision_bits=_precision(args))
        return _render(report, args)
    v = kn_seifert(args.n)
    if args.json:
        return _dump({"name": kn_family_name(args.n), "seifert_matrix": v.matrix.to_lists()})
    return f"{kn_family_name(args.n)}: {v.to_json()}\n"


def cmd_sweep(args: argparse.Namespace) -> str:
    reports = ribbon_classifier.sweep_family(args.n_from, args.n_to, _precision(args))
    if args.json:
        return "[" + ",\n".join(r.model_dump_json(indent=2) for r in reports) + "]\n"
    lines = [f"{'n':>4}  {'tipo':<11} {'min':>3} {'max':>3}"]
    for n, r in zip(range(args.n_from, args.n_to + 1), reports):
        lines.append(f"{n:>4}  {r.module_kind.value:<11} {r.disc_count.min:>3} {r.disc_count.max:>3}")
    return "\n".join(lines) + "\n"


def cmd_ext(args: argparse.Namespace) -> str:
    group = ext1_linear_pair(LaurentPoly.parse(args.f), LaurentPoly.parse(args.g))
    return _dump({"ext1": str(group), "order": group.order}) if args.json else f"{group}\n"


# --- Parser ---

class RibbonArgumentParser(argparse.ArgumentParser):
    """Parser cujos erros de uso viram InvalidInputError (código 1) em vez de SystemExit(2)."""

    def error(self, message: str):
        logging.error(f"Uso inválido de {self.prog}: {message}")
        raise InvalidInputError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    """Monta o parser com os subcomandos; cada subparser guarda seu handler em 'handler'."""
    common = RibbonArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Saída em JSON.")
    common.add_argument("--precision-bits", type=int, default=settings.DEFAULT_PRECISION_BITS,
                        help=f"Precisão inicial em bits (teto {settings.MAX_PRECISION_BITS}).")
    common.add_argument("--strands", type=int, default=None, help="Número de cordas da trança de entrada.")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v para INFO, -vv para DEBUG.")

    parser = RibbonArgumentParser(prog="ribbon", description=settings.PROJECT_DESCRIPTION)
    parser.add_argument("--version", action="version", version=f"{settings.PROJECT_NAME} {settings.PROJECT_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=RibbonArgumentParser)

    def add(name: str, handler: Handler, help_text: str, knot: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        if knot:
            p.add_argument("knot", help="Matriz de Seifert em JSON, palavra de trança ou arquivo.")
        p.set_defaults(handler=handler, exit_status=0)
        return p

    add("alex", cmd_alex, "Polinômio de Alexander.")
    add("module-type", cmd_module_type, "Tipo do módulo de Alexander e geradores.")
    add("lagrangians", cmd_lagrangians, "Lagrangianos da forma de Blanchfield.")
    add("blanchfield", cmd_blanchfield, "Matriz da forma de Blanchfield.")
    p = add("signature", cmd_signature, "Função de assinatura de Levine-Tristram.")
    p.add_argument("--at", default=None, help="Avalia num único s racional (ex.: 1/3).")
    p.add_argument("--plot-json", default=None, help="Arquivo para os dados de plotagem.")
    add("rho0", cmd_rho0, "Integral da função de assinatura.")
    p = add("classify", cmd_classify, "Classifica os discos G-homotopy ribbon.")
    p.add_argument("--derivative", action="append", help="Derivada por lagrangiano: P1=unknot, P2=braid:\"-1 -1 -1\".")
    p.add_argument("--builtin", action="store_true", help="Usa as derivadas conhecidas da família K_n.")
    p = add("kn", cmd_kn, "Matriz de Seifert de K_n.", knot=False)
    p.add_argument("n", type=int)
    p.add_argument("--classify", action="store_true", help="Classifica K_n com as derivadas conhecidas.")
    p = add("sweep", cmd_sweep, "Classifica K_n num intervalo de n.", knot=False)
    p.add_argument("n_from", type=int)
    p.add_argument("n_to", type=int)
    p = add("ext", cmd_ext, "Grupo Ext^1 de dois polinômios lineares.", knot=False)
    p.add_argument("f")
    p.add_argument("g")
    return parser
