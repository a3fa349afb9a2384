"""
Polinômios de Laurent com coeficientes inteiros: o anel Z[t^±1] onde vive toda a
álgebra de módulos da aplicação.

A aritmética de soma e deslocamento é feita diretamente sobre a tupla de
coeficientes; produto, divisão, mdc, resultante e determinantes são delegados ao
sympy sobre o representante polinomial t^(-low_exp) * p.
"""
import logging                  # Registro de depuração das operações mais caras (adjunta).
import re                       # Expressão regular do parser textual "c*t^k".
from dataclasses import dataclass
from fractions import Fraction  # Pontos racionais de avaliação (t = 1/2, s = 1/6...).
from functools import lru_cache # Cache de cyclotomic_orders, chamado a cada avaliação pontual da assinatura.
from typing import Mapping, Sequence

from mpmath import iv           # Aritmética intervalar para avaliar p no círculo unitário.
from sympy import ZZ, Poly, Symbol, cyclotomic_poly, totient # Produto, divisão, mdc e resultante exatos em Z[t].
from sympy.polys.matrices import DomainMatrix # Determinante sem frações sobre o anel ZZ[t].

from app.core.config import settings    # Teto de precisão (MAX_PRECISION_BITS).
from app.core.exceptions import CertificationError, InvalidInputError
from app.core.intervals import RationalInterval, interval_precision, iv_from_fraction, rational_enclosure

T = Symbol("t")  # variável do anel de Laurent
X = Symbol("x")  # variável de lp_symmetric_reduce, x = t + t^-1

_TERM = re.compile(r"([+-]?)(\d*)(\*?t(?:\^(-?\d+))?)?")  # sinal, coeficiente, monômio, expoente


@dataclass(frozen=True)
class LaurentPoly:
    """
    p(t) = sum(coeffs[i] * t^(low_exp + i)).

    A forma canônica é imposta na construção: sem zeros nas pontas da tupla e,
    para o polinômio nulo, coeffs vazio e low_exp = 0.
    """
    low_exp: int = 0
    coeffs: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        coeffs = tuple(int(c) for c in self.coeffs)  # aceita Integer do sympy e bool
        start, end = 0, len(coeffs)
        while start < end and coeffs[start] == 0:    # zeros à esquerda sobem o menor expoente
            start += 1
        while end > start and coeffs[end - 1] == 0:  # zeros à direita só encurtam a tupla
            end -= 1
        # dataclass congelada: os campos normalizados são gravados com object.__setattr__.
        object.__setattr__(self, "coeffs", coeffs[start:end])
        object.__setattr__(self, "low_exp", int(self.low_exp) + start if end > start else 0)

    # --- Construtores ---
    @classmethod
    def constant(cls, c: int) -> "LaurentPoly":
        return cls(0, (c,))

    @classmethod
    def monomial(cls, c: int, k: int) -> "LaurentPoly":
        return cls(k, (c,))

    @classmethod
    def from_dict(cls, terms: Mapping[int, int]) -> "LaurentPoly":
        terms = {k: c for k, c in terms.items() if c}
        if not terms:
            return cls()
        low, high = min(terms), max(terms)
        return cls(low, tuple(terms.get(k, 0) for k in range(low, high + 1)))

    @classmethod
    def from_poly(cls, poly: Poly, low_exp: int = 0) -> "LaurentPoly":
        """Converte um Poly do sympy (em t, coeficientes inteiros) multiplicado por t^low_exp."""
        coeffs = poly.all_coeffs()
        if any(not c.is_integer for c in coeffs):
            raise InvalidInputError(f"coeficientes não inteiros: {poly.as_expr()}")
        return cls(low_exp, tuple(int(c) for c in reversed(coeffs)))

    @classmethod
    def parse(cls, text: str) -> "LaurentPoly":
        """
        Lê a forma textual "c*t^k" somada, por exemplo "2*t^2-5*t+2" ou "t^-1-2".

        Raises:
            InvalidInputError: Se o texto não for uma soma de termos válida.
        """
        s = text.replace(" ", "").replace("**", "^")  # aceita também a potência do Python
        if not s:
            raise InvalidInputError(f"invalid polynomial text: {text!r}")
        terms: dict[int, int] = {}  # expoente -> coeficiente acumulado
        pos = 0
        while pos < len(s):
            m = _TERM.match(s, pos)
            sign, digits, mono, exp = m.groups()
            # Termo vazio, sem número nem 't', ou sem sinal depois do primeiro: texto inválido.
            if m.end() == pos or not (digits or mono) or (pos > 0 and not sign):
                raise InvalidInputError(f"invalid polynomial text: {text!r}")
            if mono and mono.startswith("*") and not digits:  # "*t" solto
                raise InvalidInputError(f"invalid polynomial text: {text!r}")
            c = int(digits) if digits else 1
            k = (int(exp) if exp is not None else 1) if mono else 0  # "t" sozinho é t^1
            terms[k] = terms.get(k, 0) + (-c if sign == "-" else c)
            pos = m.end()
        return cls.from_dict(terms)

    # --- Propriedades ---
    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def high_exp(self) -> int:
        return self.low_exp + len(self.coeffs) - 1

    @property
    def width(self) -> int:
        """Diferença entre o maior e o menor expoente (-1 para o polinômio nulo)."""
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> int:
        i = k - self.low_exp
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def terms(self) -> dict[int, int]:
        return {self.low_exp + i: c for i, c in enumerate(self.coeffs) if c}

    # --- Aritmética ---
    def __add__(self, other: "LaurentPoly | int") -> "LaurentPoly":
        other = _coerce(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        low = min(self.low_exp, other.low_exp)     # faixa de expoentes que cobre os dois
        high = max(self.high_exp, other.high_exp)
        return LaurentPoly(low, tuple(self.coeff(k) + other.coeff(k) for k in range(low, high + 1)))

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.low_exp, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "LaurentPoly | int") -> "LaurentPoly":
        return self + (-_coerce(other))

    def __rsub__(self, other: "LaurentPoly | int") -> "LaurentPoly":
        return _coerce(other) - self

    def __mul__(self, other: "LaurentPoly | int") -> "LaurentPoly":
        if not isinstance(other, (LaurentPoly, int)):
            return NotImplemented  # vetores do módulo definem __rmul__
        return lp_mul(self, _coerce(other))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "LaurentPoly":
        if e < 0:
            if len(self.coeffs) != 1 or abs(self.coeffs[0]) != 1:
                raise InvalidInputError("apenas unidades ±t^k têm inversa em Z[t^±1]")
            return LaurentPoly(-self.low_exp * -e, (self.coeffs[0] ** -e,))  # (±t^k)^e = (±1)^|e| t^(k*e)
        result = LaurentPoly.constant(1)
        for _ in range(e):  # expoentes pequenos (potências de t + t^-1 em lp_symmetric_reduce)
            result = result * self
        return result

    def shift(self, k: int) -> "LaurentPoly":
        """Multiplica por t^k."""
        return LaurentPoly(self.low_exp + k, self.coeffs) if self.coeffs else self

    def conj(self) -> "LaurentPoly":
        """Involução t -> t^-1."""
        if self.is_zero:
            return self
        return LaurentPoly(-self.high_exp, tuple(reversed(self.coeffs)))

    def evaluate(self, x: Fraction | int) -> Fraction:
        x = Fraction(x)
        return sum((c * x ** k for k, c in self.terms().items()), Fraction(0))

    def evaluate_mod(self, r: int, m: int) -> int:
        """Valor em t = r no anel Z/m (r precisa ser invertível mod m se houver expoentes negativos)."""
        return sum(c * pow(r, k, m) for k, c in self.terms().items()) % m

    # --- Conversões ---
    def to_poly(self) -> Poly:
        """Representante polinomial t^(-low_exp) * p como Poly do sympy em t."""
        return Poly(list(reversed(self.coeffs)) or [0], T, domain=ZZ)

    def as_expr(self):
        return sum((c * T ** k for k, c in self.terms().items()), 0 * T)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for k in range(self.high_exp, self.low_exp - 1, -1):  # do maior para o menor expoente
            c = self.coeff(k)
            if not c:
                continue
            sign = "-" if c < 0 else ("+" if parts else "")   # sem '+' no primeiro termo
            a = abs(c)
            if k == 0:
                body = str(a)
            else:
                mono = "t" if k == 1 else f"t^{k}"
                body = mono if a == 1 else f"{a}*{mono}"
            parts.append(sign + body)
        return "".join(parts)


def _coerce(value: "LaurentPoly | int") -> LaurentPoly:
    if isinstance(value, LaurentPoly):
        return value
    return LaurentPoly.constant(int(value))


ONE = LaurentPoly.constant(1)
ZERO = LaurentPoly()
TVAR = LaurentPoly.monomial(1, 1)


@dataclass(frozen=True)
class CircleValue:
    """Envoltórias racionais certificadas das partes real e imaginária de p(e^(2*pi*i*s))."""
    re: RationalInterval
    im: RationalInterval

    @property
    def may_vanish(self) -> bool:
        return self.re.contains(0) and self.im.contains(0)


# --- Operações do anel ---

def lp_mul(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """Produto exato; a largura do produto é a soma das larguras."""
    if p.is_zero or q.is_zero:
        return ZERO
    return LaurentPoly.from_poly(p.to_poly() * q.to_poly(), p.low_exp + q.low_exp)


def lp_canonical(p: LaurentPoly) -> LaurentPoly:
    """Representante canônico da classe de p módulo unidades ±t^k: menor expoente 0, coeficiente líder positivo."""
    if p.is_zero:
        return p
    sign = 1 if p.coeffs[-1] > 0 else -1                     # coeficiente líder positivo
    return LaurentPoly(0, tuple(sign * c for c in p.coeffs))  # menor expoente em 0


def lp_doteq_equal(p: LaurentPoly, q: LaurentPoly) -> bool:
    """p ≐ q, isto é, p = ±t^k q para algum inteiro k."""
    return lp_canonical(p) == lp_canonical(q)


def lp_resultant(p: LaurentPoly, q: LaurentPoly) -> int:
    """
    Valor absoluto da resultante dos representantes polinomiais de p e q.

    Raises:
        InvalidInputError: Se p ou q for o polinômio nulo.
    """
    if p.is_zero or q.is_zero:
        raise InvalidInputError("resultant undefined for zero polynomial")
    return abs(int(p.to_poly().resultant(q.to_poly())))


def lp_gcd(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """Máximo divisor comum em Z[t^±1], devolvido na forma canônica."""
    if p.is_zero:
        return lp_canonical(q)
    if q.is_zero:
        return lp_canonical(p)
    return lp_canonical(LaurentPoly.from_poly(p.to_poly().gcd(q.to_poly())))


def _quotient(p: LaurentPoly, d: LaurentPoly) -> LaurentPoly | None:
    if d.is_zero:
        raise InvalidInputError("divisão por polinômio nulo")
    if p.is_zero:
        return ZERO
    # Os representantes têm termo constante não nulo, então divisibilidade em Z[t^±1]
    # equivale à divisibilidade dos representantes em Z[t].
    q, r = p.to_poly().div(d.to_poly())
    if not r.is_zero or any(not c.is_integer for c in q.all_coeffs()):
        return None
    return LaurentPoly.from_poly(q, p.low_exp - d.low_exp)


def lp_divides(d: LaurentPoly, p: LaurentPoly) -> bool:
    return _quotient(p, d) is not None


def lp_exact_divide(p: LaurentPoly, d: LaurentPoly) -> LaurentPoly:
    """
    Quociente exato p / d em Z[t^±1].

    Raises:
        InvalidInputError: Se d não divide p.
    """
    q = _quotient(p, d)
    if q is None:
        raise InvalidInputError(f"{d} não divide {p} em Z[t^±1]")
    return q


def lp_eval_circle(p: LaurentPoly, s: Fraction | int, precision: int) -> CircleValue:
    """
    Envoltória certificada de p(e^(2*pi*i*s)) com largura <= 2^-precision.

    Args:
        p (LaurentPoly): Polinômio avaliado.
        s (Fraction): Ângulo normalizado em [0, 1).
        precision (int): Bits de largura máxima das envoltórias.

    Returns:
        CircleValue: Intervalos racionais para as partes real e imaginária.
    """
    s = Fraction(s)
    target = Fraction(1, 2 ** precision)  # largura máxima pedida
    if p.is_zero:
        return CircleValue(RationalInterval.point(0), RationalInterval.point(0))
    # Bits extras para absorver o tamanho dos coeficientes e o número de termos somados.
    guard = 16 + max(abs(c) for c in p.coeffs).bit_length() + len(p.coeffs).bit_length()
    bits = precision + guard
    while True:
        with interval_precision(bits):
            theta = 2 * iv.pi * iv_from_fraction(s)  # ângulo como intervalo, pi incluído
            re_part, im_part = iv.mpf(0), iv.mpf(0)
            for k, c in p.terms().items():
                if k == 0:
                    re_part += c                     # termo constante é exato
                    continue
                re_part += c * iv.cos(k * theta)     # Re(e^(i*k*theta)) = cos(k*theta)
                im_part += c * iv.sin(k * theta)
            value = CircleValue(rational_enclosure(re_part), rational_enclosure(im_part))
        if value.re.width <= target and value.im.width <= target:
            return value
        if bits > 2 * settings.MAX_PRECISION_BITS:
            raise CertificationError("cannot certify (possible singularity)")
        bits *= 2                                    # dobra a precisão e tenta de novo


def lp_symmetric_reduce(p: LaurentPoly) -> Poly:
    """
    Escreve um p palíndromo (a menos de unidades) como t^d * q(t + t^-1).

    Raízes de p no círculo unitário (exceto ±1) correspondem às raízes de q em (-2, 2),
    cada par conjugado e^(±2*pi*i*s) indo em x = 2cos(2*pi*s).

    Returns:
        Poly: q em x com coeficientes inteiros.

    Raises:
        InvalidInputError: Se p não for palíndromo a menos de unidades.
    """
    c = lp_canonical(p)
    # Palíndromo de largura par: coeficientes iguais lidos nos dois sentidos.
    if c.is_zero or c.width % 2 or c.coeffs != tuple(reversed(c.coeffs)):
        raise InvalidInputError("not palindromic up to units")
    d = c.width // 2
    rest = c.shift(-d)                       # centrado: expoentes de -d a d
    x_laurent = LaurentPoly(-1, (1, 0, 1))   # t^-1 + t
    q_coeffs = [0] * (d + 1)                 # q_coeffs[e] multiplica x^e
    # Elimina o termo de maior grau com (t + t^-1)^e, que também é simétrico.
    for e in range(d, -1, -1):
        a = rest.coeff(e)
        if a:
            q_coeffs[e] = a
            rest = rest - a * x_laurent ** e
    if not rest.is_zero:
        raise InvalidInputError("not palindromic up to units")
    return Poly(list(reversed(q_coeffs)), X, domain=ZZ)


@lru_cache(maxsize=256)
def cyclotomic_orders(p: LaurentPoly) -> frozenset[int]:
    """
    Conjunto dos b tais que o polinômio ciclotômico Phi_b divide p.

    e^(2*pi*i*a/b), com a/b irredutível, é raiz de p exatamente quando b pertence ao conjunto.
    """
    if p.is_zero:
        raise InvalidInputError("polinômio nulo não tem conjunto finito de raízes")
    base = lp_canonical(p).to_poly()  # representante em Z[t] com termo constante não nulo
    w = p.width
    orders = set()
    # phi(b) >= sqrt(b/2), logo phi(b) <= w implica b <= 2*w^2.
    for b in range(1, 2 * w * w + 1):
        if totient(b) > w:            # Phi_b tem grau phi(b): não cabe em p
            continue
        if base.rem(Poly(cyclotomic_poly(b, T), T, domain=ZZ)).is_zero:
            orders.add(b)
    return frozenset(orders)


# --- Matrizes sobre Z[t^±1] ---

def _clear_row_shifts(rows: Sequence[Sequence[LaurentPoly]]) -> tuple[list[list[Poly]], int] | None:
    cleared, total = [], 0
    for row in rows:
        lows = [e.low_exp for e in row if not e.is_zero]
        if not lows:
            return None   # linha nula: determinante zero
        k = min(lows)
        total += k        # t^k sai da linha e volta multiplicando o determinante
        cleared.append([e.shift(-k).to_poly() if not e.is_zero else Poly(0, T, domain=ZZ) for e in row])
    return cleared, total


def laurent_det(rows: Sequence[Sequence[LaurentPoly]]) -> LaurentPoly:
    """
    Determinante de uma matriz quadrada sobre Z[t^±1].

    Cada linha é multiplicada por t^-k para cair em Z[t]; o determinante é
    calculado no anel de polinômios (eliminação sem frações do sympy) e o fator
    t^(soma dos k) é devolvido no fim.
    """
    m = len(rows)
    if m == 0:
        return ONE
    cleared = _clear_row_shifts(rows)
    if cleared is None:
        return ZERO
    polys, total = cleared
    ring = ZZ[T]                             # anel de polinômios, sem passar por frações
    matrix = DomainMatrix([[ring.from_sympy(p.as_expr()) for p in row] for row in polys], (m, m), ring)
    det_expr = ring.to_sympy(matrix.det())
    return LaurentPoly.from_poly(Poly(det_expr, T, domain=ZZ), total)


def laurent_adjugate(rows: Sequence[Sequence[LaurentPoly]]) -> list[list[LaurentPoly]]:
    """Matriz adjunta clássica: adj[j][i] = (-1)^(i+j) * det(menor que remove a linha i e a coluna j)."""
    m = len(rows)
    if m == 1:
        return [[ONE]]
    adj = [[ZERO] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            minor = [[rows[r][c] for c in range(m) if c != j] for r in range(m) if r != i]
            value = laurent_det(minor)
            adj[j][i] = -value if (i + j) % 2 else value  # cofator transposto
    logging.debug(f"Adjunta {m}x{m} calculada sobre Z[t^±1].")
    return adj
