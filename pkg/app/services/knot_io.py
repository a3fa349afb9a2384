"""
Camada de entrada: matrizes de Seifert, a família K_n, palavras de tranças,
matrizes de Seifert de fechos de tranças, o polinômio de Alexander pela
representação de Burau reduzida e os metabolizadores de gênero 1.
"""
import json
import logging
from dataclasses import dataclass
from math import gcd, isqrt
from typing import Optional, Sequence

from app.core.exceptions import InvalidInputError
from app.services.exact_linalg import IntMatrix
from app.services.laurent import ONE, ZERO, LaurentPoly, laurent_det, lp_canonical, lp_exact_divide


@dataclass(frozen=True)
class SeifertMatrix:
    """Matriz de Seifert V (tamanho 2g) com det(V - V^T) = 1. Use validate_seifert para construir."""
    matrix: IntMatrix

    @property
    def size(self) -> int:
        return self.matrix.rows

    @property
    def genus(self) -> int:
        return self.size // 2

    def __getitem__(self, index: tuple[int, int]) -> int:
        return self.matrix[index]

    def direct_sum(self, other: "SeifertMatrix") -> "SeifertMatrix":
        """Soma em blocos, a matriz de Seifert da soma conexa."""
        return SeifertMatrix(self.matrix.block_diag(other.matrix))

    def to_json(self) -> str:
        return json.dumps(self.matrix.to_lists())


@dataclass(frozen=True)
class BraidWord:
    """
    Palavra de trança em 'strands' cordas. Cada letra é ±i (1 <= i < strands):
    +i é o cruzamento positivo sigma_i, -i o negativo; a palavra é lida de baixo para cima.
    """
    strands: int
    letters: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "letters", tuple(int(x) for x in self.letters))
        if self.strands < 1:
            raise InvalidInputError(f"número de cordas inválido: {self.strands}")
        bad = [x for x in self.letters if x == 0 or abs(x) >= self.strands]
        if bad:
            raise InvalidInputError(f"letras fora do intervalo para {self.strands} cordas: {bad}")

    @classmethod
    def parse(cls, text: str, strands: Optional[int] = None) -> "BraidWord":
        """
        Lê inteiros com sinal separados por espaço, por exemplo "-1 -1 -1".
        Sem 'strands', usa max|letra| + 1.
        """
        try:
            letters = tuple(int(tok) for tok in text.replace(",", " ").split())
        except ValueError:
            raise InvalidInputError(f"palavra de trança inválida: {text!r}")
        if strands is None:
            strands = max((abs(x) for x in letters), default=0) + 1
        return cls(strands, letters)

    def __str__(self) -> str:
        return " ".join(str(x) for x in self.letters)


@dataclass(frozen=True, order=True)
class Metabolizer:
    """Vetor primitivo isotrópico (coordenadas na base {a, b} da superfície), primeira entrada não nula positiva."""
    vector: tuple[int, int]

    def __str__(self) -> str:
        return f"({self.vector[0]}, {self.vector[1]})"


# --- Matrizes de Seifert ---

def validate_seifert(v: IntMatrix | Sequence[Sequence[int]]) -> SeifertMatrix:
    """
    Valida uma matriz de Seifert.

    Raises:
        InvalidInputError: "not a Seifert matrix: ..." com a condição que falhou.
    """
    matrix = v if isinstance(v, IntMatrix) else IntMatrix.from_rows(v)
    if not matrix.is_square:
        raise InvalidInputError(f"not a Seifert matrix: not square ({matrix.rows}x{matrix.cols})")
    if matrix.rows % 2:
        raise InvalidInputError(f"not a Seifert matrix: odd size {matrix.rows}")
    skew_det = (matrix - matrix.transpose()).det()
    if skew_det != 1:
        raise InvalidInputError(f"not a Seifert matrix: det(V - V^T) = {skew_det}, expected 1")
    return SeifertMatrix(matrix)


def parse_seifert_json(text: str) -> SeifertMatrix:
    """Lê uma matriz de Seifert no formato JSON (lista de listas de inteiros)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"JSON inválido para matriz de Seifert: {e}")
    if not isinstance(data, list) or any(
        not isinstance(row, list) or any(isinstance(x, bool) or not isinstance(x, int) for x in row) for row in data
    ):
        raise InvalidInputError("a matriz de Seifert deve ser uma lista de listas de inteiros")
    cols = len(data[0]) if data else 0
    if any(len(row) != cols for row in data):
        raise InvalidInputError("not a Seifert matrix: rows of different lengths")
    return validate_seifert(IntMatrix.from_rows(data, cols))


def kn_seifert(n: int) -> SeifertMatrix:
    """Matriz de Seifert ((n, 2), (1, 0)) do nó K_n."""
    return validate_seifert([[n, 2], [1, 0]])


def kn_family_name(n: int) -> str:
    """K_0 é o nó 9_46; K_n acrescenta n torções completas em uma das bandas."""
    return "K_0 (9_46)" if n == 0 else f"K_{n}"


def kn_parameter(v: SeifertMatrix) -> Optional[int]:
    """Devolve n se v for exatamente kn_seifert(n), senão None."""
    if v.size == 2 and (v[0, 1], v[1, 0], v[1, 1]) == (2, 1, 0):
        return v[0, 0]
    return None


# --- Tranças ---

def gamma_braid(k: int) -> BraidWord:
    """
    gamma_k = (s_k^-1 ... s_1^-1)(s_1^-1 ... s_k^-1)(s_k^-1 ... s_1^-1) em k+1 cordas;
    gamma_0 é a trança trivial em uma corda.
    """
    if k < 0:
        raise InvalidInputError(f"gamma_k definido para k >= 0, recebido {k}")
    down = [-i for i in range(k, 0, -1)]
    up = [-i for i in range(1, k + 1)]
    return BraidWord(k + 1, tuple(down + up + down))


def braid_closure_components(w: BraidWord) -> int:
    """Número de componentes do fecho (ciclos da permutação induzida)."""
    perm = list(range(w.strands))
    for letter in w.letters:
        i = abs(letter)
        perm[i - 1], perm[i] = perm[i], perm[i - 1]
    seen, cycles = set(), 0
    for start in range(w.strands):
        if start in seen:
            continue
        cycles += 1
        p = start
        while p not in seen:
            seen.add(p)
            p = perm[p]
    return cycles


def _require_knot(w: BraidWord) -> None:
    if braid_closure_components(w) != 1:
        logging.error(f"Fecho da trança '{w}' tem mais de uma componente.")
        raise InvalidInputError("closure is a link, not a knot")


def braid_to_seifert(w: BraidWord) -> SeifertMatrix:
    """
    Matriz de Seifert da superfície do algoritmo de Seifert no fecho da trança.

    Um disco por corda e uma banda por letra; cada laço vai de uma ocorrência de
    sigma_i até a próxima ocorrência do mesmo índice. Os laços são ordenados pela
    posição inicial.

    Raises:
        InvalidInputError: Se o fecho não for um nó.
    """
    _require_knot(w)
    x = w.letters
    loops = []
    for start, letter in enumerate(x):
        end = next((j for j in range(start + 1, len(x)) if abs(x[j]) == abs(letter)), None)
        if end is not None:
            loops.append((start, end))

    def sign(p: int) -> int:
        return 1 if x[p] > 0 else -1

    size = len(loops)
    v = [[0] * size for _ in range(size)]
    for a, (ia, ha) in enumerate(loops):
        v[a][a] = -(sign(ia) + sign(ha)) // 2
        for b in range(a + 1, size):
            ib, hb = loops[b]
            if ha < ib or ha > hb:
                continue  # disjuntos ou encaixados
            if ha == ib:
                # Laços consecutivos na mesma coluna, compartilhando o cruzamento ib.
                if sign(ib) > 0:
                    v[a][b] = 1
                else:
                    v[b][a] = -1
                continue
            column_gap = abs(x[ib]) - abs(x[ia])
            if column_gap == 1:
                v[a][b] = 1
            elif column_gap == -1:
                v[b][a] = -1
    return validate_seifert(IntMatrix.from_rows(v, size))


# Padrões 3x3 da representação de Burau reduzida de sigma_i e sigma_i^-1,
# posicionados nas linhas/colunas i-2, i-1, i e recortados à dimensão n-1.
_T = LaurentPoly.monomial(1, 1)
_TINV = LaurentPoly.monomial(1, -1)
_BURAU = {
    1: ((ONE, ZERO, ZERO), (_T, -_T, ONE), (ZERO, ZERO, ONE)),
    -1: ((ONE, ZERO, ZERO), (ONE, -_TINV, _TINV), (ZERO, ZERO, ONE)),
}


def _burau_letter(letter: int, strands: int) -> list[list[LaurentPoly]]:
    m = strands - 1
    matrix = [[ONE if r == c else ZERO for c in range(m)] for r in range(m)]
    pattern = _BURAU[1 if letter > 0 else -1]
    offset = abs(letter) - 2
    for r in range(3):
        for c in range(3):
            row, col = offset + r, offset + c
            if 0 <= row < m and 0 <= col < m:
                matrix[row][col] = pattern[r][c]
    return matrix


def _laurent_matmul(a: list[list[LaurentPoly]], b: list[list[LaurentPoly]]) -> list[list[LaurentPoly]]:
    n = len(a)
    result = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = ZERO
            for k in range(n):
                if not a[i][k].is_zero and not b[k][j].is_zero:
                    acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        result.append(row)
    return result


def alexander_via_burau(w: BraidWord) -> LaurentPoly:
    """
    Polinômio de Alexander do fecho: det(I - Burau_reduzida(w)) / (1 + t + ... + t^(n-1)),
    devolvido como representante canônico módulo unidades.
    """
    _require_knot(w)
    m = w.strands - 1
    rho = [[ONE if r == c else ZERO for c in range(m)] for r in range(m)]
    for letter in w.letters:
        rho = _laurent_matmul(rho, _burau_letter(letter, w.strands))
    difference = [[(ONE if r == c else ZERO) - rho[r][c] for c in range(m)] for r in range(m)]
    numerator = laurent_det(difference)
    return lp_canonical(lp_exact_divide(numerator, LaurentPoly(0, (1,) * w.strands)))


# --- Metabolizadores ---

def _normalize_vector(x: int, y: int) -> tuple[int, int]:
    g = gcd(x, y)
    x, y = x // g, y // g
    if x < 0 or (x == 0 and y < 0):
        x, y = -x, -y
    return x, y


def genus1_metabolizers(v: SeifertMatrix) -> list[Metabolizer]:
    """
    Vetores primitivos isotrópicos de q(x, y) = (x, y) V (x, y)^T, a menos de sinal.

    q = A x^2 + B xy + C y^2 é classificada pelo discriminante D = B^2 - 4AC:
    D < 0 ou não quadrado perfeito não dá nenhum; D = 0 dá uma reta; D > 0 quadrado dá duas.

    Raises:
        InvalidInputError: Se V não for 2x2, ou se a forma for identicamente nula.
    """
    if v.size != 2:
        raise InvalidInputError(f"metabolizadores de gênero 1 exigem matriz 2x2 (recebido {v.size}x{v.size})")
    a, b, c = v[0, 0], v[0, 1] + v[1, 0], v[1, 1]
    if a == b == c == 0:
        raise InvalidInputError("forma quadrática nula: todo vetor é isotrópico")
    disc = b * b - 4 * a * c
    if disc < 0 or isqrt(disc) ** 2 != disc:
        return []
    r = isqrt(disc)
    if a != 0:
        candidates = [(-b + r, 2 * a), (-b - r, 2 * a)]
    else:
        # q = y (B x + C y)
        candidates = [(1, 0), (-c, b)] if b else [(1, 0)]
    vectors = sorted({_normalize_vector(x, y) for x, y in candidates})
    for x, y in vectors:
        assert a * x * x + b * x * y + c * y * y == 0
    return [Metabolizer(vec) for vec in vectors]
