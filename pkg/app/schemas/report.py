# app/schemas/report.py

from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field, model_validator  # BaseModel/Field para os esquemas; model_validator
                                                        # verifica as regras que envolvem mais de um campo.

from app.schemas.signature import Rho0Export
from app.services.alex_module import ModuleKind
from app.services.lt_signature import Rho0Sign


class VerdictStatus(str, Enum):
    DISC_EXISTS = "DiscExists"
    OBSTRUCTED = "Obstructed"
    UNKNOWN = "Unknown"


class ReportFormat(str, Enum):
    JSON = "json"
    TEXT = "text"


class LagrangianVerdict(BaseModel):
    """Veredito de um lagrangiano: existe disco, está obstruído por rho0, ou não se sabe."""
    lagrangian: str = Field(..., description="Rótulo do lagrangiano (P1 para t-2, P2 para 2t-1).")
    factor: str = Field(..., description="Polinômio que anula o quociente M/P.")
    generator: list[str] = Field(..., description="Gerador do lagrangiano nas coordenadas da apresentação.")
    metabolizer: tuple[int, int] = Field(..., description="Metabolizador que induz o lagrangiano.")
    derivative: str = Field(..., description="Derivada usada: unknot, braid:<palavra> ou unknown.")
    status: VerdictStatus
    witness: Optional[str] = Field(None, description="Construção que realiza o disco (só em DiscExists).")
    rho0: Optional[Rho0Export] = Field(None, description="rho0 da derivada, quando calculado.")
    reason: Optional[str] = Field(None, description="Motivo do status Unknown.")

    @model_validator(mode="after")
    def check_status(self) -> "LagrangianVerdict":
        if self.status is VerdictStatus.OBSTRUCTED and (
            self.rho0 is None or self.rho0.sign not in (Rho0Sign.POSITIVE, Rho0Sign.NEGATIVE)
        ):
            raise ValueError("Obstructed exige rho0 com sinal certificado não nulo")
        if self.status is VerdictStatus.DISC_EXISTS and not self.witness:
            raise ValueError("DiscExists exige a construção testemunha")
        return self


class DiscCount(BaseModel):
    min: int = Field(..., ge=0, le=2, description="Discos garantidos (lagrangianos realizados).")
    max: int = Field(..., ge=0, le=2, description="2 menos os lagrangianos obstruídos.")

    @model_validator(mode="after")
    def check_order(self) -> "DiscCount":
        if self.min > self.max:
            raise ValueError(f"contagem inconsistente: min {self.min} > max {self.max}")
        return self


class ClassificationReport(BaseModel):
    """
    Resultado da classificação de discos G-homotopy ribbon de um nó de gênero 1.
    O esquema é estável: é o formato de saída do comando 'classify --json'.
    """
    knot: str = Field(..., description="Descrição da entrada (nome da família ou matriz).")
    seifert_matrix: list[list[int]] = Field(..., description="Matriz de Seifert usada.")
    delta: str = Field(..., description="Polinômio de Alexander normalizado.")
    module_kind: Optional[ModuleKind] = Field(None, description="Tipo do módulo de Alexander.")
    verdicts: list[LagrangianVerdict] = Field(default_factory=list)
    disc_count: DiscCount
    reason: Optional[str] = Field(None, description="Motivo quando não há vereditos.")

    @model_validator(mode="after")
    def check_counts(self) -> "ClassificationReport":
        if len(self.verdicts) not in (0, 2):
            raise ValueError(f"esperados 0 ou 2 vereditos, recebidos {len(self.verdicts)}")
        exists = sum(v.status is VerdictStatus.DISC_EXISTS for v in self.verdicts)
        obstructed = sum(v.status is VerdictStatus.OBSTRUCTED for v in self.verdicts)
        expected = (exists, 2 - obstructed) if self.verdicts else (0, 0)
        if (self.disc_count.min, self.disc_count.max) != expected:
            raise ValueError(f"contagem {self.disc_count} não corresponde aos vereditos")
        return self
