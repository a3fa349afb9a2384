# app/schemas/signature.py

from fractions import Fraction

from pydantic import BaseModel, Field

from app.core.intervals import RationalInterval
from app.services.lt_signature import Rho0Result, Rho0Sign, SignatureFunction


def _pair(r: RationalInterval) -> tuple[str, str]:
    return str(r.lo), str(r.hi)


class ArcModel(BaseModel):
    s_interval: tuple[str, str] = Field(..., description="Subintervalo racional [lo, hi] do arco, entre saltos.")
    value: int = Field(..., description="Assinatura constante no arco.")


class SignatureFunctionExport(BaseModel):
    """Dados de plotagem da função de assinatura (saída de 'signature --plot-json')."""
    delta: str = Field(..., description="Polinômio de Alexander.")
    jumps: list[tuple[str, str]] = Field(..., description="Intervalos isolantes dos saltos em (0, 1).")
    arcs: list[ArcModel]

    @classmethod
    def from_function(cls, f: SignatureFunction) -> "SignatureFunctionExport":
        # Cada arco vai do extremo superior do salto anterior ao inferior do próximo.
        edges = [Fraction(0)] + [x for j in f.jumps for x in (j.lo, j.hi)] + [Fraction(1)]
        arcs = [
            ArcModel(s_interval=(str(edges[2 * i]), str(edges[2 * i + 1])), value=value)
            for i, value in enumerate(f.arc_values)
        ]
        return cls(delta=str(f.delta), jumps=[_pair(j) for j in f.jumps], arcs=arcs)


class Rho0Export(BaseModel):
    enclosure: tuple[str, str]
    sign: Rho0Sign
    approx: float

    @classmethod
    def from_result(cls, r: Rho0Result) -> "Rho0Export":
        return cls(enclosure=_pair(r.enclosure), sign=r.sign, approx=float(r.enclosure.midpoint))
