import threading
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from mpmath import iv                                   # Contexto de aritmética intervalar rigorosa do mpmath.
from mpmath.libmp import finf, fnan, fninf, to_rational # Representação interna dos extremos (mpf "cru").

from app.core.exceptions import CertificationError

# O contexto 'iv' do mpmath guarda a precisão globalmente; o lock serializa quem a altera.
_IV_LOCK = threading.RLock()


@contextmanager
def interval_precision(bits: int) -> Iterator[object]:
    """
    Executa um bloco com o contexto intervalar do mpmath na precisão pedida,
    restaurando a precisão anterior ao sair.

    Args:
        bits (int): Precisão de trabalho, em bits de mantissa.

    Yields:
        O próprio contexto 'iv' do mpmath.
    """
    with _IV_LOCK:
        saved = iv.prec
        iv.prec = bits
        try:
            yield iv
        finally:
            iv.prec = saved


@dataclass(frozen=True)
class RationalInterval:
    """Intervalo fechado [lo, hi] com extremos racionais exatos."""
    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"intervalo vazio: [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: Fraction | int) -> "RationalInterval":
        return cls(Fraction(x), Fraction(x))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x: Fraction | int) -> bool:
        return self.lo <= x <= self.hi

    def overlaps(self, other: "RationalInterval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def sign(self) -> Optional[int]:
        """Sinal certificado (+1, -1, 0 para o ponto zero) ou None se o intervalo contém 0 sem ser [0, 0]."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == 0 and self.hi == 0:
            return 0
        return None

    def __add__(self, other: "RationalInterval") -> "RationalInterval":
        return RationalInterval(self.lo + other.lo, self.hi + other.hi)

    def __neg__(self) -> "RationalInterval":
        return RationalInterval(-self.hi, -self.lo)

    def __sub__(self, other: "RationalInterval") -> "RationalInterval":
        return self + (-other)

    def scale(self, c: Fraction | int) -> "RationalInterval":
        a, b = self.lo * c, self.hi * c
        return RationalInterval(min(a, b), max(a, b))

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


def iv_from_fraction(x: Fraction | int):
    """Intervalo do mpmath (na precisão corrente) que contém o racional x."""
    x = Fraction(x)
    return iv.mpf(x.numerator) / x.denominator


def rational_enclosure(x) -> RationalInterval:
    """
    Converte um intervalo do mpmath para RationalInterval sem arredondar os extremos.

    Raises:
        CertificationError: Se algum extremo for infinito ou NaN (divisão por intervalo com zero).
    """
    lo, hi = x._mpi_
    if lo in (finf, fninf, fnan) or hi in (finf, fninf, fnan):
        raise CertificationError("cannot certify (possible singularity)")
    return RationalInterval(Fraction(*to_rational(lo)), Fraction(*to_rational(hi)))
