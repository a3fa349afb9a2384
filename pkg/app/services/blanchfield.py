"""
Forma de Blanchfield a partir da matriz de Seifert, com valores em Q(t)/Z[t^±1].
"""
import logging
from dataclasses import dataclass

from app.core.exceptions import InvalidInputError
from app.services.alex_module import Lagrangian, ModElt, presented_module
from app.services.knot_io import SeifertMatrix
from app.services.laurent import ONE, ZERO, LaurentPoly, lp_canonical, lp_exact_divide, lp_gcd

# Convenção única do pareamento: B = PAIRING_CONVENTION * (1 - t) * (tV - V^T)^-1 = (t - 1) * A^-1.
# A forma (1 - t)(V - tV^T)^-1 dos livros é a transposta de B, isto é, sua conjugada.
# Com A^-1 = adj(A)/det(A) e conj(A)^T = -t^-1 A, esta B é hermitiana exatamente, e o
# autopareamento do gerador cíclico de K_n (n = 3k + x) vale -x(t-1)^2/((t-2)(2t-1)).
# O primeiro argumento de bl_pair é o conjugado.
PAIRING_CONVENTION = -1

_ONE_MINUS_T = LaurentPoly(0, (1, -1))


def _reduce_numerator(num: LaurentPoly, den: LaurentPoly) -> LaurentPoly:
    """Subtrai múltiplos inteiros de t^k * den pelas duas pontas enquanto a divisão dos coeficientes for exata."""
    degree, lead, const = den.width, den.coeffs[-1], den.coeffs[0]
    changed = True
    while changed and not num.is_zero:
        changed = False
        while not num.is_zero and num.high_exp >= degree and num.coeffs[-1] % lead == 0:
            num = num - LaurentPoly.monomial(num.coeffs[-1] // lead, num.high_exp - degree) * den
            changed = True
        while not num.is_zero and num.low_exp < 0 and num.coeffs[0] % const == 0:
            num = num - LaurentPoly.monomial(num.coeffs[0] // const, num.low_exp) * den
            changed = True
    return num


@dataclass(frozen=True, eq=False)
class FractionModRing:
    """
    Classe de num/den em Q(t)/Z[t^±1].

    Após 'reduce': den canônico (menor expoente 0, líder positivo), mdc(num, den)
    unidade e num reduzido pelas duas pontas. Zero exatamente quando den = 1.
    A igualdade é semântica: diferença nula em Q(t)/Z[t^±1].
    """
    num: LaurentPoly
    den: LaurentPoly

    @classmethod
    def reduce(cls, num: LaurentPoly, den: LaurentPoly) -> "FractionModRing":
        if den.is_zero:
            raise InvalidInputError("denominador nulo em Q(t)/Z[t^±1]")
        if num.is_zero:
            return cls(ZERO, ONE)
        sign = 1 if den.coeffs[-1] > 0 else -1
        num = (num * sign).shift(-den.low_exp)
        den = lp_canonical(den)
        g = lp_gcd(num, den)
        if g != ONE:
            num, den = lp_exact_divide(num, g), lp_exact_divide(den, g)
        if den == ONE:
            return cls(ZERO, ONE)
        return cls(_reduce_numerator(num, den), den)

    @classmethod
    def zero(cls) -> "FractionModRing":
        return cls(ZERO, ONE)

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero or self.den == ONE

    def __add__(self, other: "FractionModRing") -> "FractionModRing":
        return FractionModRing.reduce(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self) -> "FractionModRing":
        return FractionModRing(-self.num, self.den)

    def __sub__(self, other: "FractionModRing") -> "FractionModRing":
        return self + (-other)

    def scale(self, p: LaurentPoly) -> "FractionModRing":
        return FractionModRing.reduce(self.num * p, self.den)

    def conj(self) -> "FractionModRing":
        return FractionModRing.reduce(self.num.conj(), self.den.conj())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FractionModRing):
            return NotImplemented
        return (self - other).is_zero

    def __str__(self) -> str:
        return f"{self.num} / {self.den} (mod Z[t^±1])"


@dataclass(frozen=True, eq=False)
class BlanchfieldForm:
    """Matriz do pareamento nos geradores da apresentação, B = (t-1) adj(A) / det(A)."""
    seifert: SeifertMatrix
    numerators: tuple[tuple[LaurentPoly, ...], ...]
    denominator: LaurentPoly
    entries: tuple[tuple[FractionModRing, ...], ...]

    @property
    def size(self) -> int:
        return len(self.entries)

    def entry(self, i: int, j: int) -> FractionModRing:
        return self.entries[i][j]


def blanchfield_matrix(v: SeifertMatrix) -> BlanchfieldForm:
    """
    Constrói a forma de Blanchfield de V.

    Args:
        v (SeifertMatrix): Matriz de Seifert (0x0 dá a forma vazia).

    Returns:
        BlanchfieldForm: Entradas reduzidas em Q(t)/Z[t^±1], hermitiana.
    """
    module = presented_module(v)
    if module.rank == 0:
        return BlanchfieldForm(v, (), ONE, ())
    factor = _ONE_MINUS_T * PAIRING_CONVENTION  # = t - 1
    numerators = tuple(tuple(factor * a for a in row) for row in module.adjugate)
    entries = tuple(
        tuple(FractionModRing.reduce(n, module.determinant) for n in row) for row in numerators
    )
    logging.debug(f"Forma de Blanchfield {module.rank}x{module.rank} com denominador {module.determinant}.")
    return BlanchfieldForm(v, numerators, module.determinant, entries)


def bl_pair(form: BlanchfieldForm, v: ModElt, w: ModElt) -> FractionModRing:
    """
    conj(v)^T B w em Q(t)/Z[t^±1]; conjuga o primeiro argumento:
    bl_pair(p·v, w) = p(t^-1) bl_pair(v, w) e bl_pair(v, p·w) = p(t) bl_pair(v, w).
    """
    if form.size == 0:
        return FractionModRing.zero()
    if len(v.coords) != form.size or len(w.coords) != form.size:
        raise InvalidInputError(f"elementos devem ter {form.size} coordenadas")
    total = ZERO
    for i, vi in enumerate(v.coords):
        if vi.is_zero:
            continue
        vi_bar = vi.conj()
        for j, wj in enumerate(w.coords):
            n = form.numerators[i][j]
            if not wj.is_zero and not n.is_zero:
                total = total + vi_bar * n * wj
    return FractionModRing.reduce(total, form.denominator)


def bl_vanishes_on(form: BlanchfieldForm, lagrangian: Lagrangian) -> bool:
    """Verdadeiro se o gerador de L pareia trivialmente consigo mesmo (basta para L cíclico)."""
    if form.size == 0:
        return True
    return bl_pair(form, lagrangian.generator, lagrangian.generator).is_zero
