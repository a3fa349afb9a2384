"""
Estrutura do módulo de Alexander apresentado por tV - V^T (cokernel agindo em
vetores coluna): polinômio de Alexander, dicotomia cíclico/decomposto quando
Delta ≐ (t-2)(2t-1), lagrangianos, grupos Ext e a correspondência
metabolizador -> lagrangiano.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterator, Sequence

from sympy import factorint

from app.core.config import settings
from app.core.exceptions import CertificationError, InvalidInputError
from app.services.exact_linalg import AbelianGroup, IntMatrix, finite_quotient_group, snf
from app.services.knot_io import Metabolizer, SeifertMatrix, genus1_metabolizers
from app.services.laurent import (
    ZERO,
    LaurentPoly,
    laurent_adjugate,
    laurent_det,
    lp_canonical,
    lp_divides,
    lp_doteq_equal,
    lp_resultant,
)

T_MINUS_2 = LaurentPoly(0, (-2, 1))
TWO_T_MINUS_1 = LaurentPoly(0, (-1, 2))
TARGET_DELTA = lp_canonical(T_MINUS_2 * TWO_T_MINUS_1)


class ModuleKind(str, Enum):
    CYCLIC = "CyclicT2T1"
    SPLIT = "SplitT2T1"
    OTHER = "Other"


class LagrangianFactor(str, Enum):
    """Fator que anula o quociente M/P do lagrangiano P."""
    T_MINUS_2 = "T_minus_2"
    TWO_T_MINUS_1 = "TwoT_minus_1"

    @property
    def polynomial(self) -> LaurentPoly:
        return T_MINUS_2 if self is LagrangianFactor.T_MINUS_2 else TWO_T_MINUS_1

    @property
    def complement(self) -> "LagrangianFactor":
        if self is LagrangianFactor.T_MINUS_2:
            return LagrangianFactor.TWO_T_MINUS_1
        return LagrangianFactor.T_MINUS_2

    @property
    def label(self) -> str:
        """P1 para o lado t-2, P2 para o lado 2t-1."""
        return "P1" if self is LagrangianFactor.T_MINUS_2 else "P2"


@dataclass(frozen=True)
class ModElt:
    """Elemento do módulo em coordenadas dos geradores da apresentação."""
    coords: tuple[LaurentPoly, ...]

    @classmethod
    def from_ints(cls, values: Sequence[int]) -> "ModElt":
        return cls(tuple(LaurentPoly.constant(v) for v in values))

    @classmethod
    def basis(cls, i: int, rank: int) -> "ModElt":
        return cls.from_ints([int(j == i) for j in range(rank)])

    def __add__(self, other: "ModElt") -> "ModElt":
        return ModElt(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "ModElt":
        return ModElt(tuple(-a for a in self.coords))

    def __sub__(self, other: "ModElt") -> "ModElt":
        return self + (-other)

    def __rmul__(self, p: LaurentPoly | int) -> "ModElt":
        return ModElt(tuple(a * p for a in self.coords))

    def evaluate(self, x: Fraction) -> list[Fraction]:
        return [a.evaluate(x) for a in self.coords]

    def __str__(self) -> str:
        return "(" + ", ".join(str(a) for a in self.coords) + ")"


@dataclass(frozen=True)
class PresentedModule:
    """
    coker(A), A = tV - V^T. Como A^-1 = adj(A)/det(A) sobre Q(t), um vetor v é
    nulo no módulo exatamente quando det(A) divide cada entrada de adj(A)·v.
    """
    seifert: SeifertMatrix
    presentation: tuple[tuple[LaurentPoly, ...], ...]
    determinant: LaurentPoly
    adjugate: tuple[tuple[LaurentPoly, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.presentation)

    def apply_adjugate(self, v: ModElt) -> list[LaurentPoly]:
        result = []
        for row in self.adjugate:
            acc = ZERO
            for a, x in zip(row, v.coords):
                if not a.is_zero and not x.is_zero:
                    acc = acc + a * x
            result.append(acc)
        return result

    def is_zero(self, v: ModElt) -> bool:
        if self.rank == 0:
            return True
        return all(lp_divides(self.determinant, w) for w in self.apply_adjugate(v))

    def equal(self, x: ModElt, y: ModElt) -> bool:
        return self.is_zero(x - y)

    def relation(self, j: int) -> ModElt:
        """j-ésima coluna de A, uma relação do módulo."""
        return ModElt(tuple(row[j] for row in self.presentation))

    def evaluate(self, x: Fraction) -> list[list[Fraction]]:
        return [[a.evaluate(x) for a in row] for row in self.presentation]


@lru_cache(maxsize=512)
def presented_module(v: SeifertMatrix) -> PresentedModule:
    m = v.size
    t = LaurentPoly.monomial(1, 1)
    rows = tuple(
        tuple(t * v[i, j] - v[j, i] for j in range(m)) for i in range(m)
    )
    det = laurent_det(rows)
    adj = tuple(tuple(r) for r in laurent_adjugate(rows)) if m else ()
    return PresentedModule(v, rows, det, adj)


@lru_cache(maxsize=512)
def alexander_polynomial(v: SeifertMatrix) -> LaurentPoly:
    """
    det(tV - V^T) normalizado com menor expoente 0 e valor +1 em t = 1.

    Args:
        v (SeifertMatrix): Matriz de Seifert válida.

    Returns:
        LaurentPoly: O polinômio de Alexander normalizado (1 para a matriz 0x0).
    """
    det = presented_module(v).determinant
    if det.is_zero:
        return det
    shifted = det.shift(-det.low_exp)
    return -shifted if shifted.evaluate(1) < 0 else shifted


@dataclass(frozen=True)
class Lagrangian:
    """Submódulo cíclico gerado por 'generator'; 'factor' anula o quociente M/P."""
    generator: ModElt
    factor: LagrangianFactor

    @property
    def annihilator(self) -> LaurentPoly:
        """Anulador de P, o fator complementar."""
        return self.factor.complement.polynomial

    @property
    def label(self) -> str:
        return self.factor.label


@dataclass(frozen=True)
class ModuleFacts:
    delta: LaurentPoly
    kind: ModuleKind
    generators: tuple[ModElt, ...]
    module: PresentedModule = field(compare=False, repr=False)


# --- Busca de geradores ---

def _slot_values(bound: int) -> list[int]:
    values = []
    for c in range(1, bound + 1):
        values += [c, -c]
    return values + [0]


def _weighted_vectors(slots: int, weight: int, bound: int) -> Iterator[tuple[int, ...]]:
    if slots == 0:
        if weight == 0:
            yield ()
        return
    for c in _slot_values(bound):
        if abs(c) <= weight:
            for rest in _weighted_vectors(slots - 1, weight - abs(c), bound):
                yield (c,) + rest


def _candidates(rank: int) -> Iterator[ModElt]:
    """Vetores com entradas c0 + c1*t + ... (largura configurada), em ordem de peso |c| crescente."""
    width = settings.GENERATOR_SEARCH_WIDTH
    bound = settings.GENERATOR_SEARCH_COEFF_BOUND
    slots = rank * width
    emitted = 0
    for weight in range(1, slots * bound + 1):
        for flat in _weighted_vectors(slots, weight, bound):
            yield ModElt(tuple(LaurentPoly(0, flat[i * width:(i + 1) * width]) for i in range(rank)))
            emitted += 1
            if emitted >= settings.GENERATOR_SEARCH_MAX_CANDIDATES:
                return


def _search_failure() -> CertificationError:
    width, bound = settings.GENERATOR_SEARCH_WIDTH, settings.GENERATOR_SEARCH_COEFF_BOUND
    detail = (f"generator search failed (entries of width <= {width}, coefficients in [-{bound}, {bound}], "
              f"at most {settings.GENERATOR_SEARCH_MAX_CANDIDATES} candidates)")
    logging.error(detail)
    return CertificationError(detail)


# Raízes dos dois fatores de Delta; ambas vivem em Z[1/2].
_ROOTS = (Fraction(2), Fraction(1, 2))


def _spans_at(module: PresentedModule, elements: Sequence[ModElt], root: Fraction) -> bool:
    """
    As colunas de [A(r) | elementos(r)] geram Z[1/2]^m? Equivale a gerar M/(t-r)M.
    Escala por uma potência de 2 e lê a forma de Smith: posto m e fatores potências de 2.
    """
    m = module.rank
    columns = [list(r) for r in _presentation_at(module, root)]
    for e in elements:
        for i, value in enumerate(e.evaluate(root)):
            columns[i].append(value)
    scale = max((x.denominator for row in columns for x in row), default=1)
    matrix = IntMatrix.from_rows([[int(x * scale) for x in row] for row in columns])
    diagonal, _, _ = snf(matrix)
    invariants = [diagonal[i, i] for i in range(min(matrix.rows, matrix.cols))]
    if len([d for d in invariants if d]) < m:
        return False
    return all(d & (d - 1) == 0 for d in invariants[:m])


def generates(module: PresentedModule, elements: Sequence[ModElt]) -> bool:
    """Os elementos geram o módulo (válido quando Delta ≐ (t-2)(2t-1))."""
    return all(_spans_at(module, elements, r) for r in _ROOTS)


@lru_cache(maxsize=64)
def _presentation_at(module: PresentedModule, root: Fraction) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(row) for row in module.evaluate(root))


@lru_cache(maxsize=64)
def _adjugate_at(module: PresentedModule, root: Fraction) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(a.evaluate(root) for a in row) for row in module.adjugate)


def _killed_by(module: PresentedModule, factor: LaurentPoly, other_root: Fraction, g: ModElt) -> bool:
    # Filtro barato: adj(A)(r)·g(r) precisa anular na raiz r do outro fator.
    g_values = g.evaluate(other_root)
    for row in _adjugate_at(module, other_root):
        if sum(a * x for a, x in zip(row, g_values)):
            return False
    return module.is_zero(factor * g)


def _find_cyclic_generator(module: PresentedModule) -> ModElt:
    for candidate in _candidates(module.rank):
        if generates(module, [candidate]):
            return candidate
    raise _search_failure()


def _find_split_generators(module: PresentedModule) -> tuple[ModElt, ModElt]:
    killed_t2: list[ModElt] = []
    killed_2t1: list[ModElt] = []
    for candidate in _candidates(module.rank):
        if _killed_by(module, T_MINUS_2, Fraction(1, 2), candidate):
            for g2 in killed_2t1:
                if generates(module, [candidate, g2]):
                    return candidate, g2
            killed_t2.append(candidate)
        elif _killed_by(module, TWO_T_MINUS_1, Fraction(2), candidate):
            for g1 in killed_t2:
                if generates(module, [g1, candidate]):
                    return g1, candidate
            killed_2t1.append(candidate)
    raise _search_failure()


def module_type(v: SeifertMatrix) -> ModuleFacts:
    """
    Classifica o módulo de Alexander.

    Com Delta ≐ (t-2)(2t-1) só há dois tipos. O primeiro ideal elementar E1
    (gerado pelas entradas da adjunta) reduzido módulo (3, t-2) decide: tudo nulo
    indica o tipo decomposto, caso contrário o cíclico.

    Returns:
        ModuleFacts: Delta, o tipo e os geradores (um cíclico, ou um par anulado
                     por t-2 e 2t-1, nessa ordem).

    Raises:
        CertificationError: Se a busca limitada de geradores falhar.
    """
    delta = alexander_polynomial(v)
    module = presented_module(v)
    if not lp_doteq_equal(delta, TARGET_DELTA):
        return ModuleFacts(delta, ModuleKind.OTHER, (), module)
    split = all(e.evaluate_mod(2, 3) == 0 for row in module.adjugate for e in row)
    if split:
        g1, g2 = _find_split_generators(module)
        logging.info(f"Módulo decomposto: geradores {g1} (t-2) e {g2} (2t-1).")
        return ModuleFacts(delta, ModuleKind.SPLIT, (g1, g2), module)
    g = _find_cyclic_generator(module)
    logging.info(f"Módulo cíclico com gerador {g}.")
    return ModuleFacts(delta, ModuleKind.CYCLIC, (g,), module)


def lagrangians_distinct(module: PresentedModule, first: Lagrangian, second: Lagrangian) -> bool:
    """
    Distinção dos dois lagrangianos: não existe unidade u com 2t-1 = u(t-2)
    (larguras e coeficientes diferem) e nenhum gerador pertence ao outro submódulo.
    """
    if lp_doteq_equal(first.annihilator, second.annihilator):
        return False
    if module.equal(first.generator, second.generator):
        return False
    return not module.is_zero(first.annihilator * second.generator) and not module.is_zero(
        second.annihilator * first.generator
    )


def lagrangian_set(facts: ModuleFacts) -> list[Lagrangian]:
    """
    Lagrangianos da forma de Blanchfield: vazio para o tipo Other; {(t-2)M, (2t-1)M}
    no caso cíclico; os dois somandos no caso decomposto. Ordem: lado t-2 (P1) e lado 2t-1 (P2).
    """
    if facts.kind is ModuleKind.OTHER:
        return []
    if facts.kind is ModuleKind.CYCLIC:
        (g,) = facts.generators
        result = [
            Lagrangian(T_MINUS_2 * g, LagrangianFactor.T_MINUS_2),
            Lagrangian(TWO_T_MINUS_1 * g, LagrangianFactor.TWO_T_MINUS_1),
        ]
    else:
        g1, g2 = facts.generators
        # M/(Λ g2) ≅ Λ g1 ≅ Λ/(t-2), e vice-versa.
        result = [
            Lagrangian(g2, LagrangianFactor.T_MINUS_2),
            Lagrangian(g1, LagrangianFactor.TWO_T_MINUS_1),
        ]
    for lag in result:
        if not facts.module.is_zero(lag.annihilator * lag.generator):
            raise CertificationError(f"gerador {lag.generator} não é anulado por {lag.annihilator}")
    if not lagrangians_distinct(facts.module, *result):
        raise CertificationError("lagrangianos coincidem")
    return result


def _local_order(f: tuple[int, int], g: tuple[int, int], p: int, q: int) -> int:
    """Ordem de (Z/q)[t^±1]/(f, g), q = p^e, para f e g lineares."""
    (a0, a1), (b0, b1) = f, g
    if a1 % p:
        root, other = (-a0 * pow(a1, -1, q)) % q, (b0, b1)
    elif b1 % p:
        root, other = (-b0 * pow(b1, -1, q)) % q, (a0, a1)
    elif a0 % p or b0 % p:
        return 1
    else:
        raise InvalidInputError("Ext group infinite (shared factor)")
    if root % p == 0:
        return 1  # t = root precisaria ser invertível
    return gcd(q, (other[0] + other[1] * root) % q)


def ext1_linear_pair(f: LaurentPoly, g: LaurentPoly) -> AbelianGroup:
    """
    Grupo abeliano subjacente a Z[t^±1]/(f, g) para f, g lineares, isomorfo a
    Ext^1(Z[t^±1]/(g), Z[t^±1]/(f)) pela resolução livre 0 -> Λ --g--> Λ.

    A resultante N = |res(f, g)| pertence ao ideal, logo o anel é finito e se
    decompõe nas partes p-primárias de N; em cada uma, f ou g fixa t, e o anel é cíclico.

    Raises:
        InvalidInputError: Se a resultante for 0, se f e g tiverem fator comum, ou se não forem lineares.
    """
    if lp_resultant(f, g) == 0:
        raise InvalidInputError("Ext group infinite (shared factor)")
    if f.width != 1 or g.width != 1:
        raise InvalidInputError("ext1_linear_pair espera polinômios de grau 1")
    fs, gs = f.shift(-f.low_exp), g.shift(-g.low_exp)
    pair_f, pair_g = (fs.coeff(0), fs.coeff(1)), (gs.coeff(0), gs.coeff(1))
    n = lp_resultant(f, g)
    orders = []
    for p, e in factorint(n).items():
        local = _local_order(pair_f, pair_g, p, p ** e)
        if local > 1:
            orders.append(local)
    relations = IntMatrix.from_rows([[d if i == j else 0 for j in range(len(orders))] for i, d in enumerate(orders)],
                                    len(orders))
    return finite_quotient_group(relations)


def metabolizer_image(v: SeifertMatrix, m: Metabolizer, facts: ModuleFacts) -> Lagrangian:
    """
    Imagem V·m do metabolizador nas coordenadas da apresentação e o lagrangiano
    que ela gera racionalmente (anulada pelo anulador dele, sem ser nula).

    Raises:
        InvalidInputError: Se facts.kind for Other.
        CertificationError: Se a imagem não representar exatamente um dos lagrangianos.
    """
    if facts.kind is ModuleKind.OTHER:
        raise InvalidInputError("metabolizer_image requer Delta ≐ (t-2)(2t-1)")
    x, y = m.vector
    image = ModElt.from_ints([v[i, 0] * x + v[i, 1] * y for i in range(v.size)])
    module = facts.module
    if module.is_zero(image):
        raise CertificationError("metabolizer does not represent a lagrangian")
    matches = [lag for lag in lagrangian_set(facts) if module.is_zero(lag.annihilator * image)]
    if len(matches) != 1:
        logging.error(f"Imagem {image} do metabolizador {m} casa com {len(matches)} lagrangianos.")
        raise CertificationError("metabolizer does not represent a lagrangian")
    return matches[0]


def lagrangian_metabolizer_pairs(v: SeifertMatrix, facts: ModuleFacts) -> list[tuple[Lagrangian, Metabolizer]]:
    """
    Bijeção entre os metabolizadores de gênero 1 e os lagrangianos, na ordem P1, P2.
    Vazia para o tipo Other.

    Raises:
        CertificationError: Se dois metabolizadores caírem no mesmo lagrangiano ou faltar algum.
    """
    if facts.kind is ModuleKind.OTHER:
        return []
    pairs: dict[str, tuple[Lagrangian, Metabolizer]] = {}
    for m in genus1_metabolizers(v):
        lag = metabolizer_image(v, m, facts)
        if lag.label in pairs:
            logging.error(f"Metabolizadores {pairs[lag.label][1]} e {m} representam o mesmo lagrangiano {lag.label}.")
            raise CertificationError("metabolizer does not represent a lagrangian")
        pairs[lag.label] = (lag, m)
    if set(pairs) != {"P1", "P2"}:
        raise CertificationError(f"esperados dois metabolizadores, encontrados {len(pairs)}")
    return [pairs["P1"], pairs["P2"]]
