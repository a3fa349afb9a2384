"""
Álgebra linear exata sobre os inteiros e racionais: forma normal de Smith,
grupos abelianos finitamente apresentados, isolamento de raízes reais por
sequências de Sturm e assinatura certificada de matrizes hermitianas intervalares.
"""
import logging                  # Registro dos refinamentos de precisão e das raízes isoladas.
from dataclasses import dataclass, field
from fractions import Fraction  # Extremos racionais exatos dos intervalos isolantes.
from typing import Callable, Mapping, Optional, Sequence

from mpmath import iv           # Entradas das matrizes hermitianas como intervalos.
from sympy import QQ, Matrix, Poly, Rational, sturm # Determinante de Bareiss e sequência de Sturm exatos.

from app.core.config import settings    # Teto de precisão padrão (MAX_PRECISION_BITS).
from app.core.exceptions import CertificationError, InvalidInputError
from app.core.intervals import RationalInterval, interval_precision, iv_from_fraction, rational_enclosure
from app.services.laurent import X      # Variável padrão dos polinômios dados como lista de coeficientes.


# --- Matrizes inteiras ---

@dataclass(frozen=True)
class IntMatrix:
    """Matriz de inteiros de precisão arbitrária, guardada como tupla de linhas."""
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise InvalidInputError(f"dimensões inconsistentes: {self.rows}x{self.cols}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        entries = tuple(tuple(int(x) for x in r) for r in rows)
        width = cols if cols is not None else (len(entries[0]) if entries else 0)
        return cls(len(entries), width, entries)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], n)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        return self.entries[i][j]

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)], self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise InvalidInputError(f"produto inválido: {self.rows}x{self.cols} por {other.rows}x{other.cols}")
        return IntMatrix.from_rows(
            [[sum(self.entries[i][k] * other.entries[k][j] for k in range(self.cols)) for j in range(other.cols)]
             for i in range(self.rows)],
            other.cols,
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix.from_rows(
            [[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.cols
        )

    def det(self) -> int:
        if not self.is_square:
            raise InvalidInputError("determinante de matriz não quadrada")
        if self.rows == 0:
            return 1
        return int(Matrix(self.entries).det(method="bareiss"))

    def block_diag(self, other: "IntMatrix") -> "IntMatrix":
        rows = [list(r) + [0] * other.cols for r in self.entries]
        rows += [[0] * self.cols + list(r) for r in other.entries]
        return IntMatrix.from_rows(rows, self.cols + other.cols)

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.entries]


def snf(a: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """
    Forma normal de Smith com matrizes de passagem.

    Args:
        a (IntMatrix): Matriz m x n.

    Returns:
        tuple: (S, U, W) com S = U * A * W, U e W unimodulares e a diagonal de S
               formando uma cadeia de divisibilidade d1 | d2 | ... de inteiros >= 0.
    """
    m, n = a.rows, a.cols
    s = a.to_lists()                        # cópia mutável que vira a forma de Smith
    u = IntMatrix.identity(m).to_lists()    # acumula as operações de linha
    w = IntMatrix.identity(n).to_lists()    # acumula as operações de coluna

    def swap_rows(i: int, j: int) -> None:
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i: int, j: int) -> None:
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in w:
            row[i], row[j] = row[j], row[i]

    def add_row(target: int, source: int, q: int) -> None:
        s[target] = [x + q * y for x, y in zip(s[target], s[source])]
        u[target] = [x + q * y for x, y in zip(u[target], u[source])]

    def add_col(target: int, source: int, q: int) -> None:
        for row in s:
            row[target] += q * row[source]
        for row in w:
            row[target] += q * row[source]

    for t in range(min(m, n)):
        nonzero = [(abs(s[i][j]), i, j) for i in range(t, m) for j in range(t, n) if s[i][j]]
        if not nonzero:
            break                            # bloco restante nulo: o resto da diagonal é 0
        _, i0, j0 = min(nonzero)             # menor entrada em módulo vira o pivô
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            pivot = s[t][t]
            for i in range(t + 1, m):        # reduz a coluna t pela divisão euclidiana
                q = s[i][t] // pivot
                if q:
                    add_row(i, t, -q)
            for j in range(t + 1, n):        # e a linha t da mesma forma
                q = s[t][j] // pivot
                if q:
                    add_col(j, t, -q)
            # Restos não nulos são menores que o pivô: trazem-se para a posição (t, t).
            leftovers = [(abs(s[i][t]), i, t) for i in range(t + 1, m) if s[i][t]]
            leftovers += [(abs(s[t][j]), t, j) for j in range(t + 1, n) if s[t][j]]
            if leftovers:
                _, i1, j1 = min(leftovers)
                swap_rows(t, i1)
                swap_cols(t, j1)
                continue
            # Entrada não divisível pelo pivô quebraria a cadeia d1 | d2 | ...
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if s[i][j] % pivot), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)            # traz a entrada para a linha do pivô e repete
        if s[t][t] < 0:                      # diagonal com sinal positivo
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]
    return IntMatrix.from_rows(s, n), IntMatrix.from_rows(u, m), IntMatrix.from_rows(w, n)


# --- Grupos abelianos ---

@dataclass(frozen=True)
class AbelianGroup:
    """Z^free_rank ⊕ Z/d1 ⊕ ... ⊕ Z/dk, com d1 | d2 | ... e cada di > 1."""
    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if any(d <= 1 for d in self.torsion):
            raise ValueError(f"fatores de torção devem ser > 1: {self.torsion}")
        if any(b % a for a, b in zip(self.torsion, self.torsion[1:])):
            raise ValueError(f"cadeia de divisibilidade violada: {self.torsion}")

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def order(self) -> Optional[int]:
        """Ordem do grupo, ou None se for infinito."""
        if self.free_rank:
            return None
        order = 1
        for d in self.torsion:
            order *= d
        return order

    def __str__(self) -> str:
        parts = [f"Z^{self.free_rank}" if self.free_rank > 1 else "Z"] if self.free_rank else []
        parts += [f"Z/{d}" for d in self.torsion]
        return " ⊕ ".join(parts) if parts else "0"


def finite_quotient_group(rel: IntMatrix) -> AbelianGroup:
    """
    Grupo abeliano gerado pelas linhas de 'rel' (uma por gerador livre) módulo
    as relações dadas pelas colunas.
    """
    diagonal, _, _ = snf(rel)
    invariants = [abs(diagonal[i, i]) for i in range(min(rel.rows, rel.cols))]
    nonzero = [d for d in invariants if d]
    # Geradores sem relação não nula são livres; fatores 1 não contribuem.
    return AbelianGroup(free_rank=rel.rows - len(nonzero), torsion=tuple(d for d in nonzero if d > 1))


# --- Isolamento de raízes reais ---

def _horner(coeffs: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


def _fractions(poly: Poly) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(c.p), int(c.q)) for c in poly.all_coeffs())


def _split_point(coeffs: Sequence[Fraction], lo: Fraction, hi: Fraction) -> Fraction:
    """Ponto interior de (lo, hi) que não é raiz; há no máximo grau-muitas tentativas falhas."""
    k = 2
    while True:
        for j in range(1, k):                # pontos j/k do intervalo, começando pelo meio
            x = lo + (hi - lo) * Fraction(j, k)
            if k > 2 and j * 2 == k:         # o meio já foi testado com k = 2
                continue
            if _horner(coeffs, x):
                return x
        k += 1


@dataclass(frozen=True)
class RootInterval:
    """Intervalo aberto (lo, hi) com exatamente uma raiz real distinta; extremos nunca são raízes."""
    lo: Fraction
    hi: Fraction
    multiplicity: int = 1

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def as_interval(self) -> RationalInterval:
        return RationalInterval(self.lo, self.hi)


@dataclass(frozen=True)
class RootIsolation:
    """Intervalos isolantes ordenados e disjuntos das raízes do polinômio livre de quadrados."""
    coefficients: tuple[Fraction, ...]
    intervals: tuple[RootInterval, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.intervals)

    def refine_interval(self, index: int, width: Fraction) -> RootInterval:
        root = self.intervals[index]
        lo, hi = root.lo, root.hi
        f_lo = _horner(self.coefficients, lo)
        while hi - lo > width:
            mid = _split_point(self.coefficients, lo, hi)
            f_mid = _horner(self.coefficients, mid)
            if (f_lo > 0) != (f_mid > 0):    # troca de sinal: a raiz está à esquerda
                hi = mid
            else:
                lo, f_lo = mid, f_mid
        return RootInterval(lo, hi, root.multiplicity)

    def refine(self, width: Fraction) -> "RootIsolation":
        """Estreita todos os intervalos até largura <= width (bisseção guiada pela troca de sinal)."""
        return RootIsolation(
            self.coefficients, tuple(self.refine_interval(i, width) for i in range(len(self.intervals)))
        )


def isolate_real_roots(q: Poly | Sequence[int], window: RationalInterval) -> RootIsolation:
    """
    Isola as raízes reais distintas de q no intervalo aberto da janela.

    A parte livre de quadrados de q é tomada primeiro; raízes racionais sobre os
    extremos da janela são divididas fora e a contagem em cada subintervalo vem
    da sequência de Sturm.

    Args:
        q (Poly | Sequence[int]): Polinômio inteiro (Poly do sympy, ou coeficientes do maior para o menor grau).
        window (RationalInterval): Janela (lo, hi), extremos excluídos.

    Returns:
        RootIsolation: Intervalos ordenados, cada um com a multiplicidade da raiz em q.

    Raises:
        InvalidInputError: Se q for o polinômio nulo.
    """
    poly = q if isinstance(q, Poly) else Poly(list(q), X)
    if poly.is_zero:
        raise InvalidInputError("isolamento de raízes do polinômio nulo")
    if poly.degree() <= 0:
        return RootIsolation((Fraction(1),))
    gen = poly.gens[0]
    sqf = poly.sqf_part().to_field()         # raízes simples, mesmas raízes distintas de q
    for endpoint in (window.lo, window.hi):  # extremos não podem ser raízes do polinômio de Sturm
        linear = Poly([1, -Rational(endpoint.numerator, endpoint.denominator)], gen, domain=QQ)
        while sqf.degree() > 0 and sqf.rem(linear).is_zero:
            sqf = sqf.exquo(linear)
    coeffs = _fractions(sqf)
    if sqf.degree() <= 0:
        return RootIsolation(coeffs)
    chain = [_fractions(p) for p in sturm(sqf)]

    def variations(x: Fraction) -> int:
        signs = [v > 0 for v in (_horner(c, x) for c in chain) if v]  # zeros são ignorados
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    found: list[tuple[Fraction, Fraction]] = []
    # Cada item: (lo, hi, número de raízes em (lo, hi]) pelo teorema de Sturm.
    stack = [(window.lo, window.hi, variations(window.lo) - variations(window.hi))]
    while stack:
        lo, hi, count = stack.pop()
        if count == 0:
            continue
        if count == 1:
            found.append((lo, hi))
            continue
        mid = _split_point(coeffs, lo, hi)   # mid nunca é raiz
        v_mid = variations(mid)
        stack.append((lo, mid, variations(lo) - v_mid))
        stack.append((mid, hi, v_mid - variations(hi)))
    found.sort()

    # Multiplicidade: o fator livre de quadrados que troca de sinal no intervalo.
    factors = [(_fractions(f.to_field()), k) for f, k in poly.sqf_list()[1]]
    intervals = []
    for lo, hi in found:
        multiplicity = next(
            (k for c, k in factors if (_horner(c, lo) > 0) != (_horner(c, hi) > 0)), 1
        )
        intervals.append(RootInterval(lo, hi, multiplicity))
    logging.debug(f"{len(intervals)} raízes isoladas em ({window.lo}, {window.hi}).")
    return RootIsolation(coeffs, tuple(intervals))


# --- Assinatura certificada de matrizes hermitianas intervalares ---

@dataclass(frozen=True)
class ComplexInterval:
    """Par (re, im) de intervalos do mpmath."""
    re: object
    im: object

    def conj(self) -> "ComplexInterval":
        return ComplexInterval(self.re, -self.im)


@dataclass(frozen=True)
class HermitianIntervalMatrix:
    """
    Matriz hermitiana intervalar: diagonal real e triângulo superior estrito.
    A entrada (j, i) é sempre lida como conjugada da (i, j).
    """
    size: int
    diagonal: tuple
    upper: Mapping[tuple[int, int], ComplexInterval]
    precision_bits: int

    def entry(self, i: int, j: int) -> ComplexInterval:
        if i == j:
            return ComplexInterval(self.diagonal[i], iv.mpf(0))
        if i < j:
            return self.upper[(i, j)]
        return self.upper[(j, i)].conj()

    @classmethod
    def from_rational(
        cls,
        diagonal: Sequence[Fraction | int],
        upper: Mapping[tuple[int, int], tuple[Fraction | int, Fraction | int]],
        precision_bits: int,
    ) -> "HermitianIntervalMatrix":
        """Envolve uma matriz hermitiana racional exata; entradas ausentes de 'upper' valem 0."""
        n = len(diagonal)
        with interval_precision(precision_bits):
            diag = tuple(iv_from_fraction(d) for d in diagonal)
            up = {}
            for i in range(n):
                for j in range(i + 1, n):
                    re, im = upper.get((i, j), (0, 0))
                    up[(i, j)] = ComplexInterval(iv_from_fraction(re), iv_from_fraction(im))
        return cls(n, diag, up, precision_bits)


def _cmul(a: tuple, b: tuple) -> tuple:
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _cadd(a: tuple, b: tuple) -> tuple:
    return (a[0] + b[0], a[1] + b[1])


def _csub(a: tuple, b: tuple) -> tuple:
    return (a[0] - b[0], a[1] - b[1])


def _conj(a: tuple) -> tuple:
    return (a[0], -a[1])


def _abs2(a: tuple):
    return a[0] ** 2 + a[1] ** 2


def _certified_sign(x) -> Optional[int]:
    sign = rational_enclosure(x).sign()
    return sign if sign in (1, -1) else None


def _interval_inertia(h: HermitianIntervalMatrix) -> Optional[int]:
    """
    Decomposição LDL* com pivôs 1x1 ou 2x2 sobre intervalos.
    Devolve a assinatura, ou None se nenhum pivô tiver sinal certificado.
    """
    n = h.size
    with interval_precision(h.precision_bits):
        zero = iv.mpf(0)
        # Cópia densa (re, im); o complemento de Schur é feito no lugar.
        a = [[(h.entry(i, j).re, h.entry(i, j).im) for j in range(n)] for i in range(n)]
        active = list(range(n))   # índices ainda não eliminados
        signature = 0
        while active:
            # Pivô 1x1: diagonal com sinal certificado e maior limitante inferior em módulo.
            best, best_mag, best_sign = None, Fraction(0), 0
            for i in active:
                enc = rational_enclosure(a[i][i][0])
                sign = enc.sign()
                if sign in (1, -1):
                    mag = min(abs(enc.lo), abs(enc.hi))
                    if mag > best_mag:
                        best, best_mag, best_sign = i, mag, sign
            if best is not None:
                k = best
                d = a[k][k][0]
                signature += best_sign            # o pivô contribui com seu sinal
                active.remove(k)
                # A <- A - a_ik a_kj / d no triângulo superior ativo, espelhando o inferior.
                for x, i in enumerate(active):
                    for j in active[x:]:
                        if i == j:
                            a[i][i] = (a[i][i][0] - _abs2(a[i][k]) / d, zero)
                            continue
                        prod = _cmul(a[i][k], a[k][j])
                        value = (a[i][j][0] - prod[0] / d, a[i][j][1] - prod[1] / d)
                        a[i][j], a[j][i] = value, _conj(value)
                continue

            # Pivô 2x2 (Bunch-Kaufman): determinante certificado.
            pivot = None
            for x, k in enumerate(active):
                for l in active[x + 1:]:
                    det = a[k][k][0] * a[l][l][0] - _abs2(a[k][l])
                    det_sign = _certified_sign(det)
                    if det_sign == -1:
                        pivot = (k, l, det, 0)                 # autovalores de sinais opostos
                    elif det_sign == 1:
                        trace_sign = _certified_sign(a[k][k][0] + a[l][l][0])
                        if trace_sign is not None:
                            pivot = (k, l, det, 2 * trace_sign)  # dois autovalores com o sinal do traço
                    if pivot:
                        break
                if pivot:
                    break
            if pivot is None:
                return None
            k, l, det, contribution = pivot
            signature += contribution
            active.remove(k)
            active.remove(l)
            akk, all_, b = a[k][k], a[l][l], a[k][l]
            # Complemento de Schur com a inversa explícita do bloco 2x2: adj(P) / det(P).
            for x, i in enumerate(active):
                for j in active[x:]:
                    update = _cmul(_cmul(a[i][k], all_), a[k][j])
                    update = _csub(update, _cmul(_cmul(a[i][k], b), a[l][j]))
                    update = _csub(update, _cmul(_cmul(a[i][l], _conj(b)), a[k][j]))
                    update = _cadd(update, _cmul(_cmul(a[i][l], akk), a[l][j]))
                    value = (a[i][j][0] - update[0] / det, a[i][j][1] - update[1] / det)
                    if i == j:
                        a[i][i] = (value[0], zero)
                    else:
                        a[i][j], a[j][i] = value, _conj(value)
        return signature


def hermitian_signature_certified(
    h: HermitianIntervalMatrix,
    refine: Optional[Callable[[int], HermitianIntervalMatrix]] = None,
    max_bits: Optional[int] = None,
) -> int:
    """
    Assinatura (#autovalores positivos - #negativos) da matriz hermitiana exata envolvida por h.

    Args:
        h (HermitianIntervalMatrix): Envoltória inicial.
        refine (Callable): Recebe a nova precisão em bits e devolve uma envoltória mais justa.
        max_bits (int): Teto de precisão (padrão: settings.MAX_PRECISION_BITS).

    Raises:
        CertificationError: Se algum pivô continuar contendo 0 no teto de precisão.
    """
    cap = max_bits if max_bits is not None else settings.MAX_PRECISION_BITS
    current = h
    while True:
        result = _interval_inertia(current)
        if result is not None:
            return result
        bits = current.precision_bits * 2   # dobra até o teto
        if refine is None or bits > cap:
            logging.warning(f"Pivô não certificado com {current.precision_bits} bits (teto {cap}).")
            raise CertificationError("cannot certify (possible singularity)")
        logging.info(f"Refinando matriz hermitiana para {bits} bits.")
        current = refine(bits)
