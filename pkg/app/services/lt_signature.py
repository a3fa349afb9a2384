"""
Função de assinatura de Levine-Tristram certificada e sua integral rho0 sobre o círculo.

Convenções:
    - s em [0, 1) parametriza omega = e^(2*pi*i*s); o círculo tem medida total 1.
    - A matriz é (1 - omega)V + (1 - conj(omega))V^T, escolhida para que fechos de
      tranças negativas tenham assinatura >= 0 (o trevo de gamma_1 vale 2 em s = 1/2).
    - Saltos acontecem nas raízes de Delta no círculo; rho0 os ignora (medida nula)
      e value_at devolve neles a média dos limites laterais.
"""
import logging                  # Resumo da função calculada e avisos de precisão esgotada.
from concurrent.futures import ThreadPoolExecutor # Avaliação dos arcos em paralelo (settings.MAX_WORKERS).
from dataclasses import dataclass, field
from enum import Enum           # Sinal de rho0 exposto no relatório.
from fractions import Fraction
from typing import Optional

from mpmath import iv           # cos/sin intervalares da matriz hermitiana e da bisseção de ângulos.

from app.core.config import settings    # Precisão inicial e teto de precisão.
from app.core.exceptions import CertificationError, InvalidInputError
from app.core.intervals import RationalInterval, interval_precision, iv_from_fraction, rational_enclosure
from app.services.alex_module import alexander_polynomial
from app.services.exact_linalg import (
    ComplexInterval,
    HermitianIntervalMatrix,
    hermitian_signature_certified,
    isolate_real_roots,
)
from app.services.knot_io import SeifertMatrix
from app.services.laurent import LaurentPoly, cyclotomic_orders, lp_symmetric_reduce

HALF = Fraction(1, 2)


class Rho0Sign(str, Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    ZERO = "Zero"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class Rho0Result:
    """Envoltória racional de rho0 e o sinal certificado por ela."""
    enclosure: RationalInterval
    sign: Rho0Sign

    def __post_init__(self) -> None:
        expected = {1: Rho0Sign.POSITIVE, -1: Rho0Sign.NEGATIVE, 0: Rho0Sign.ZERO}.get(
            self.enclosure.sign(), Rho0Sign.UNDETERMINED
        )
        if self.sign is not expected:
            raise ValueError(f"sinal {self.sign.value} incompatível com a envoltória {self.enclosure}")

    @property
    def is_signed(self) -> bool:
        return self.sign in (Rho0Sign.POSITIVE, Rho0Sign.NEGATIVE)


@dataclass(frozen=True)
class SignatureFunction:
    """
    Função de assinatura constante por partes em (0, 1).

    jumps: intervalos racionais disjuntos e ordenados, cada um isolando uma raiz de
    Delta no círculo (simétricos por s -> 1 - s). arc_values[i] é o valor no arco
    aberto entre jumps[i-1] e jumps[i]; len(arc_values) == len(jumps) + 1.
    """
    seifert: SeifertMatrix = field(repr=False)
    delta: LaurentPoly
    jumps: tuple[RationalInterval, ...]
    arc_values: tuple[int, ...]

    @property
    def half_jumps(self) -> tuple[RationalInterval, ...]:
        """Saltos em (0, 1/2)."""
        return self.jumps[: len(self.jumps) // 2]

    def value_at(self, s: Fraction | int) -> Fraction:
        """
        Valor em qualquer s racional (tomado módulo 1). Num salto devolve a média
        dos valores dos dois arcos vizinhos; fora deles o valor do arco.
        """
        s = Fraction(s) % 1
        if s == 0:
            return Fraction(0)   # omega = 1: a matriz é nula
        jump_point = s.denominator in cyclotomic_orders(self.delta)
        for index, jump in enumerate(self.jumps):  # saltos ordenados: o primeiro que passa de s decide
            if jump.contains(s):
                if jump_point:
                    return Fraction(self.arc_values[index] + self.arc_values[index + 1], 2)
                # Ponto do intervalo isolante que não é a raiz: decide pela matriz.
                return Fraction(signature_at(self.seifert, s))
            if s < jump.lo:
                return Fraction(self.arc_values[index])
        return Fraction(self.arc_values[-1])


# --- Avaliação pontual ---

def _hermitian_at(v: SeifertMatrix, s: Fraction, bits: int) -> HermitianIntervalMatrix:
    """Envoltória de (1 - omega)V + (1 - conj(omega))V^T na precisão pedida."""
    n = v.size
    with interval_precision(bits):
        theta = 2 * iv.pi * iv_from_fraction(s)
        one_minus_c = 1 - iv.cos(theta)   # Re(1 - omega)
        sn = iv.sin(theta)                # Im(omega)
        diagonal = tuple(2 * v[i, i] * one_minus_c for i in range(n))  # 2 Re(1 - omega) V_ii
        # Entrada (i, j): (1 - omega) V_ij + (1 - conj(omega)) V_ji, separada em partes real e imaginária.
        upper = {
            (i, j): ComplexInterval((v[i, j] + v[j, i]) * one_minus_c, (v[j, i] - v[i, j]) * sn)
            for i in range(n)
            for j in range(i + 1, n)
        }
    return HermitianIntervalMatrix(n, diagonal, upper, bits)


def signature_at(v: SeifertMatrix, s: Fraction | int, precision_bits: Optional[int] = None) -> int:
    """
    Assinatura de Levine-Tristram em omega = e^(2*pi*i*s).

    Args:
        v (SeifertMatrix): Matriz de Seifert.
        s (Fraction): Ponto em (0, 1).
        precision_bits (int): Precisão inicial (padrão: settings.DEFAULT_PRECISION_BITS).

    Returns:
        int: A assinatura, sempre par.

    Raises:
        InvalidInputError: Se s estiver fora de (0, 1) ou for um ponto de salto.
        CertificationError: Se o teto de precisão for atingido.
    """
    s = Fraction(s)
    if not 0 < s < 1:
        raise InvalidInputError(f"s deve estar em (0, 1), recebido {s}")
    if v.size == 0:
        return 0   # nó trivial: matriz vazia
    delta = alexander_polynomial(v)
    # omega = e^(2*pi*i*a/b) é raiz de Delta exatamente quando Phi_b divide Delta.
    if s.denominator in cyclotomic_orders(delta):
        logging.error(f"s = {s} é raiz de {delta} no círculo.")
        raise InvalidInputError("at a jump point")
    bits = precision_bits or settings.DEFAULT_PRECISION_BITS
    return hermitian_signature_certified(
        _hermitian_at(v, s, bits),
        refine=lambda b: _hermitian_at(v, s, b),
        max_bits=settings.MAX_PRECISION_BITS,
    )


# --- Saltos ---

def _compare_cos(m: Fraction, x: Fraction, bits: int) -> Optional[int]:
    """+1 se 2cos(2*pi*m) > x, -1 se menor, None se não certificado até o teto."""
    while bits <= settings.MAX_PRECISION_BITS:
        with interval_precision(bits):
            enc = rational_enclosure(2 * iv.cos(2 * iv.pi * iv_from_fraction(m)))
        if enc.lo > x:
            return 1
        if enc.hi < x:
            return -1
        bits *= 2    # x dentro da envoltória: mais precisão
    return None


def _angle_bounds(x: Fraction, width: Fraction) -> RationalInterval:
    """
    Intervalo racional de largura <= width contendo o s em [0, 1/2] com 2cos(2*pi*s) = x.
    Bisseção com cos intervalar; o cosseno é decrescente em [0, 1/2].
    """
    lo, hi = Fraction(0), HALF
    bits = settings.DEFAULT_PRECISION_BITS + width.denominator.bit_length()  # acompanha a largura pedida
    while hi - lo > width:
        step = hi - lo
        # 2cos(2*pi*m) só é racional em poucos m; um dos três pontos sempre decide.
        for m in (lo + step / 2, lo + step / 3, lo + 2 * step / 3):
            side = _compare_cos(m, x, bits)
            if side is not None:
                break
        else:
            raise CertificationError("cannot certify (possible singularity)")
        if side > 0:
            lo = m   # cosseno ainda acima de x: o ângulo está à direita
        else:
            hi = m
    return RationalInterval(lo, hi)


def _disjoint_inside_half(intervals: list[RationalInterval]) -> bool:
    if not intervals:
        return True
    if intervals[0].lo <= 0 or intervals[-1].hi >= HALF:
        return False
    return all(a.hi < b.lo for a, b in zip(intervals, intervals[1:]))


def jump_intervals(delta: LaurentPoly, width: Fraction) -> list[RationalInterval]:
    """
    Intervalos em s, ordenados e disjuntos dentro de (0, 1/2), um por raiz de Delta
    no semicírculo superior, com largura próxima de 'width'.

    As raízes vêm de q(x), Delta = t^d q(t + t^-1), isoladas em (-2, 2) e levadas a s
    por x = 2cos(2*pi*s); as larguras diminuem até os intervalos se separarem.
    """
    isolation = isolate_real_roots(lp_symmetric_reduce(delta), RationalInterval(Fraction(-2), Fraction(2)))
    if not len(isolation):
        return []
    while True:
        isolation = isolation.refine(width)
        # x = 2cos(2*pi*s) é decrescente: o extremo superior em x dá o inferior em s.
        intervals = sorted(
            (
                RationalInterval(_angle_bounds(root.hi, width).lo, _angle_bounds(root.lo, width).hi)
                for root in isolation.intervals
            ),
            key=lambda r: r.lo,
        )
        if _disjoint_inside_half(intervals):
            return intervals
        width /= 16   # intervalos ainda se tocam: estreita e tenta de novo


def _arc_samples(half: list[RationalInterval]) -> list[Fraction]:
    """Um ponto racional por arco de (0, 1/2]: pontos médios dos vãos e s = 1/2 no arco central."""
    if not half:
        return [HALF]
    samples = [half[0].lo / 2]
    samples += [(a.hi + b.lo) / 2 for a, b in zip(half, half[1:])]
    return samples + [HALF]


def _mirror(half: list[RationalInterval]) -> tuple[RationalInterval, ...]:
    return tuple(half) + tuple(RationalInterval(1 - r.hi, 1 - r.lo) for r in reversed(half))


def signature_function(
    v: SeifertMatrix,
    precision_bits: Optional[int] = None,
    workers: Optional[int] = None,
) -> SignatureFunction:
    """
    Calcula a função de assinatura de V.

    Args:
        v (SeifertMatrix): Matriz de Seifert.
        precision_bits (int): Precisão inicial (padrão: settings.DEFAULT_PRECISION_BITS).
        workers (int): Threads para avaliar os arcos (padrão 1; o resultado não depende da ordem).

    Returns:
        SignatureFunction: Saltos isolados e valor por arco, completados por simetria.
    """
    delta = alexander_polynomial(v)
    if v.size == 0:
        return SignatureFunction(v, delta, (), (0,))
    bits = precision_bits or settings.DEFAULT_PRECISION_BITS
    half = jump_intervals(delta, Fraction(1, 2 ** 16))  # só o semicírculo (0, 1/2)
    samples = _arc_samples(half)                        # um ponto por arco

    def evaluate(s: Fraction) -> int:
        return signature_at(v, s, bits)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            half_values = list(pool.map(evaluate, samples))
    else:
        half_values = [evaluate(s) for s in samples]
    # Simetria s -> 1 - s; o arco central (que contém 1/2) não é repetido.
    values = tuple(half_values) + tuple(reversed(half_values[:-1]))
    logging.info(f"Função de assinatura: {len(half) * 2} saltos, valores {values}.")
    return SignatureFunction(v, delta, _mirror(half), values)


# --- rho0 ---

def _rho0_enclosure(values: list[int], boundaries: list[RationalInterval]) -> RationalInterval:
    """
    2 * integral em [0, 1/2] = v_m + soma 2(v_(i-1) - v_i) b_i,
    com v_i o valor do i-ésimo arco e b_i o salto entre os arcos i-1 e i.
    """
    total = RationalInterval.point(values[-1])   # valor do arco central
    for i, b in enumerate(boundaries, start=1):
        total = total + b.scale(2 * (values[i - 1] - values[i]))  # incerteza só na posição do salto
    return total


def _sign_of(enclosure: RationalInterval) -> Rho0Sign:
    return {1: Rho0Sign.POSITIVE, -1: Rho0Sign.NEGATIVE, 0: Rho0Sign.ZERO}.get(
        enclosure.sign(), Rho0Sign.UNDETERMINED
    )


def rho0(v: SeifertMatrix, precision_bits: Optional[int] = None, workers: Optional[int] = None) -> Rho0Result:
    """
    Integral da função de assinatura sobre o círculo de medida 1.

    A envoltória é estreitada até o sinal ficar certificado. Se o teto de
    settings.MAX_PRECISION_BITS for atingido, devolve sinal Undetermined com a
    envoltória obtida (cancelamento exato entre arcos não é decidível aqui).

    Returns:
        Rho0Result: Envoltória racional e sinal.
    """
    f = signature_function(v, precision_bits, workers)
    if all(value == 0 for value in f.arc_values):
        return Rho0Result(RationalInterval.point(0), Rho0Sign.ZERO)  # integral exatamente 0
    half_values = list(f.arc_values[: len(f.half_jumps) + 1])       # arcos de (0, 1/2]
    boundaries = list(f.half_jumps)
    width = Fraction(1, 2 ** 16)
    while True:
        enclosure = _rho0_enclosure(half_values, boundaries)
        sign = _sign_of(enclosure)
        if sign is not Rho0Sign.UNDETERMINED:
            logging.info(f"rho0 em {enclosure} ({sign.value}).")
            return Rho0Result(enclosure, sign)
        width *= width   # dobra os bits da largura dos saltos
        if width.denominator.bit_length() > settings.MAX_PRECISION_BITS:
            logging.warning(f"sign undetermined at max precision: rho0 em {enclosure}.")
            return Rho0Result(enclosure, Rho0Sign.UNDETERMINED)
        boundaries = jump_intervals(f.delta, width)
