"""
Classificação de discos G-homotopy ribbon para nós de gênero 1 com
Delta ≐ (t-2)(2t-1): cada lagrangiano da forma de Blanchfield corresponde a no
máximo um disco, e a derivada do metabolizador que o induz decide se o disco
existe (Delta(J) ≐ 1), se está obstruído (rho0(J) != 0) ou se fica em aberto.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Sequence

from app.core.config import settings
from app.core.exceptions import InvalidInputError
from app.schemas.report import (
    ClassificationReport,
    DiscCount,
    LagrangianVerdict,
    ReportFormat,
    VerdictStatus,
)
from app.schemas.signature import Rho0Export
from app.services.alex_module import (
    TARGET_DELTA,
    Lagrangian,
    alexander_polynomial,
    lagrangian_metabolizer_pairs,
    module_type,
)
from app.services.knot_io import (
    BraidWord,
    Metabolizer,
    SeifertMatrix,
    alexander_via_burau,
    braid_closure_components,
    braid_to_seifert,
    gamma_braid,
    kn_family_name,
    kn_seifert,
)
from app.services.laurent import ONE, lp_doteq_equal
from app.services.lt_signature import rho0

LABELS = ("P1", "P2")
DISC_WITNESS = "Δ(J) ≐ 1 construction"
DELTA_OBSTRUCTION = "Alexander polynomial obstruction: Δ is not ≐ (t-2)(2t-1)"


class DerivativeKind(str, Enum):
    UNKNOT = "unknot"
    BRAID = "braid"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Derivative:
    """Derivada J de um metabolizador: o nó trivial, o fecho de uma trança, ou desconhecida."""
    kind: DerivativeKind
    braid: Optional[BraidWord] = None

    def __post_init__(self) -> None:
        if (self.kind is DerivativeKind.BRAID) != (self.braid is not None):
            raise InvalidInputError("apenas derivadas do tipo braid levam uma palavra de trança")
        if self.braid is not None and braid_closure_components(self.braid) != 1:
            logging.error(f"Derivada '{self.braid}' não é um nó.")
            raise InvalidInputError("closure is a link, not a knot")

    @classmethod
    def parse(cls, text: str, strands: Optional[int] = None) -> "Derivative":
        """Lê 'unknot', 'unknown' ou 'braid:<letras>' (por exemplo 'braid:-1 -1 -1')."""
        kind, _, word = text.strip().partition(":")
        try:
            kind = DerivativeKind(kind.strip().lower())
        except ValueError:
            raise InvalidInputError(f"derivada inválida: {text!r} (use unknot, unknown ou braid:<palavra>)")
        if kind is DerivativeKind.BRAID:
            return cls(kind, BraidWord.parse(word.strip().strip('"'), strands))
        if word:
            raise InvalidInputError(f"derivada {kind.value} não aceita palavra: {text!r}")
        return cls(kind)

    def __str__(self) -> str:
        return f"braid:{self.braid}" if self.braid is not None else self.kind.value


UNKNOT = Derivative(DerivativeKind.UNKNOT)
UNKNOWN = Derivative(DerivativeKind.UNKNOWN)


@dataclass(frozen=True)
class DerivativeSpec:
    """Derivadas por lagrangiano, indexadas por P1 (lado t-2) e P2 (lado 2t-1); rótulos ausentes valem unknown."""
    derivatives: Mapping[str, Derivative] = field(default_factory=dict)

    def __post_init__(self) -> None:
        extra = set(self.derivatives) - set(LABELS)
        if extra:
            raise InvalidInputError(f"mismatched derivative data: unknown labels {sorted(extra)} (use P1, P2)")

    def get(self, label: str) -> Derivative:
        return self.derivatives.get(label, UNKNOWN)

    @classmethod
    def parse(cls, items: Sequence[str], strands: Optional[int] = None) -> "DerivativeSpec":
        """
        Lê entradas 'P1=unknot', 'P2=braid:-1 -1 -1'.

        Raises:
            InvalidInputError: Formato inválido, rótulo desconhecido ou rótulo repetido.
        """
        derivatives: dict[str, Derivative] = {}
        for item in items:
            label, sep, value = item.partition("=")
            label = label.strip().upper()
            if not sep:
                raise InvalidInputError(f"derivada sem rótulo: {item!r} (use P1=... ou P2=...)")
            if label in derivatives:
                raise InvalidInputError(f"mismatched derivative data: {label} given twice")
            derivatives[label] = Derivative.parse(value, strands)
        return cls(derivatives)


def builtin_derivatives(n: int) -> DerivativeSpec:
    """
    Derivadas conhecidas da família K_n.

    O lado P1 vem do metabolizador (0, 1), uma curva trivial, para todo n. Para
    n = 3k o lado P2 é trivial se k in {0, -1}, o fecho de gamma_k se k > 0 e o de
    gamma_(-k-1) se k < -1. Para n in {-1, -2} as duas derivadas são triviais.
    Nos demais casos as curvas não estão disponíveis como tranças.
    """
    if n in (-1, -2):
        return DerivativeSpec({"P1": UNKNOT, "P2": UNKNOT})
    if n % 3:
        return DerivativeSpec({"P1": UNKNOT, "P2": UNKNOWN})
    k = n // 3
    if k in (0, -1):
        p2 = UNKNOT
    elif k > 0:
        p2 = Derivative(DerivativeKind.BRAID, gamma_braid(k))
    else:
        p2 = Derivative(DerivativeKind.BRAID, gamma_braid(-k - 1))
    return DerivativeSpec({"P1": UNKNOT, "P2": p2})


# --- Vereditos ---

def _verdict(
    lagrangian: Lagrangian,
    metabolizer: Metabolizer,
    derivative: Derivative,
    precision_bits: Optional[int],
) -> LagrangianVerdict:
    base = dict(
        lagrangian=lagrangian.label,
        factor=str(lagrangian.factor.polynomial),
        generator=[str(c) for c in lagrangian.generator.coords],
        metabolizer=metabolizer.vector,
        derivative=str(derivative),
    )
    if derivative.kind is DerivativeKind.UNKNOWN:
        return LagrangianVerdict(**base, status=VerdictStatus.UNKNOWN, reason="no derivative data")
    if derivative.kind is DerivativeKind.UNKNOT or lp_doteq_equal(alexander_via_burau(derivative.braid), ONE):
        return LagrangianVerdict(**base, status=VerdictStatus.DISC_EXISTS, witness=DISC_WITNESS)

    result = rho0(braid_to_seifert(derivative.braid), precision_bits)
    export = Rho0Export.from_result(result)
    if result.is_signed:
        logging.info(f"Lagrangiano {lagrangian.label} obstruído: rho0(J) em {result.enclosure}.")
        return LagrangianVerdict(**base, status=VerdictStatus.OBSTRUCTED, rho0=export)
    reason = "ρ⁰(J) = 0 and Δ(J) is not ≐ 1" if result.enclosure.sign() == 0 else "ρ⁰(J) sign undetermined"
    return LagrangianVerdict(**base, status=VerdictStatus.UNKNOWN, rho0=export, reason=reason)


def classify_knot(
    v: SeifertMatrix,
    derivs: Optional[DerivativeSpec] = None,
    knot: Optional[str] = None,
    precision_bits: Optional[int] = None,
) -> ClassificationReport:
    """
    Conta os discos G-homotopy ribbon de um nó de gênero 1.

    Args:
        v (SeifertMatrix): Matriz de Seifert 2x2.
        derivs (DerivativeSpec): Derivadas por lagrangiano (padrão: todas desconhecidas).
        knot (str): Descrição da entrada para o relatório.
        precision_bits (int): Precisão inicial das assinaturas.

    Returns:
        ClassificationReport: Vereditos na ordem P1, P2 e a contagem [min, max].

    Raises:
        InvalidInputError: Se V não for de gênero 1.
        CertificationError: Propagado da busca de geradores ou da certificação numérica.
    """
    if v.size != 2:
        logging.error(f"Classificação recebeu matriz {v.size}x{v.size}.")
        raise InvalidInputError(f"classification requires a genus-1 Seifert matrix (got {v.size}x{v.size})")
    derivs = derivs or DerivativeSpec()
    knot = knot or f"V = {v.to_json()}"
    delta = alexander_polynomial(v)
    matrix = v.matrix.to_lists()
    if not lp_doteq_equal(delta, TARGET_DELTA):
        logging.info(f"{knot}: Delta = {delta}, sem discos.")
        return ClassificationReport(
            knot=knot, seifert_matrix=matrix, delta=str(delta),
            disc_count=DiscCount(min=0, max=0), reason=DELTA_OBSTRUCTION,
        )

    facts = module_type(v)
    pairs = lagrangian_metabolizer_pairs(v, facts)
    # Os dois ramos são independentes; map preserva a ordem P1, P2.
    with ThreadPoolExecutor(max_workers=settings.MAX_WORKERS) as pool:
        verdicts = list(pool.map(lambda p: _verdict(p[0], p[1], derivs.get(p[0].label), precision_bits), pairs))

    exists = sum(x.status is VerdictStatus.DISC_EXISTS for x in verdicts)
    obstructed = sum(x.status is VerdictStatus.OBSTRUCTED for x in verdicts)
    logging.info(f"{knot}: entre {exists} e {2 - obstructed} discos.")
    return ClassificationReport(
        knot=knot, seifert_matrix=matrix, delta=str(delta), module_kind=facts.kind,
        verdicts=verdicts, disc_count=DiscCount(min=exists, max=2 - obstructed),
    )


def classify_kn(n: int, derivs: Optional[DerivativeSpec] = None, precision_bits: Optional[int] = None) -> ClassificationReport:
    """Classifica K_n com as derivadas dadas ou, na falta delas, com builtin_derivatives(n)."""
    return classify_knot(kn_seifert(n), derivs or builtin_derivatives(n), kn_family_name(n), precision_bits)


def sweep_family(n_from: int, n_to: int, precision_bits: Optional[int] = None) -> list[ClassificationReport]:
    """Classifica K_n para n de n_from a n_to (inclusive) com as derivadas conhecidas."""
    if n_from > n_to:
        raise InvalidInputError(f"intervalo vazio: {n_from}..{n_to}")
    return [classify_kn(n, precision_bits=precision_bits) for n in range(n_from, n_to + 1)]


# --- Relatórios ---

def _render_text(r: ClassificationReport) -> str:
    lines = [f"{r.knot}", f"  Δ = {r.delta}"]
    if not r.verdicts:
        lines.append("  not G-homotopy ribbon: Alexander polynomial obstruction")
        return "\n".join(lines) + "\n"
    lines.append(f"  módulo de Alexander: {r.module_kind.value}")
    for v in r.verdicts:
        head = f"  {v.lagrangian} (M/P anulado por {v.factor}, metabolizador {v.metabolizer}, derivada {v.derivative}): "
        if v.status is VerdictStatus.DISC_EXISTS:
            lines.append(head + f"{v.status.value} [{v.witness}]")
        elif v.status is VerdictStatus.OBSTRUCTED:
            lines.append(head + f"{v.status.value} [ρ⁰(J) ∈ [{v.rho0.enclosure[0]}, {v.rho0.enclosure[1]}]]")
        else:
            lines.append(head + f"{v.status.value} [{v.reason}]")
    count = r.disc_count
    total = f"{count.min}" if count.min == count.max else f"entre {count.min} e {count.max}"
    lines.append(f"  discos G-homotopy ribbon: {total}")
    return "\n".join(lines) + "\n"


def report_render(r: ClassificationReport, fmt: ReportFormat | str = ReportFormat.JSON) -> bytes:
    """Serialização determinística do relatório em JSON (esquema ClassificationReport) ou texto."""
    if ReportFormat(fmt) is ReportFormat.JSON:
        return r.model_dump_json(indent=2).encode("utf-8")
    return _render_text(r).encode("utf-8")


def parse_report(data: bytes | str) -> ClassificationReport:
    """Inverso de report_render no formato JSON."""
    return ClassificationReport.model_validate_json(data)
