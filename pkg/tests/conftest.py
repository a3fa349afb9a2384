import random

import numpy as np
import pytest

from app.services.knot_io import BraidWord, SeifertMatrix, braid_closure_components, braid_to_seifert, validate_seifert


@pytest.fixture
def trefoil() -> SeifertMatrix:
    """Trevo negativo, fecho de sigma_1^-3: V = ((1, 0), (-1, 1)), Delta = t^2 - t + 1."""
    return braid_to_seifert(BraidWord(2, (-1, -1, -1)))


@pytest.fixture
def unknot() -> SeifertMatrix:
    return validate_seifert([])


def random_seifert(rng: random.Random, genus: int) -> SeifertMatrix:
    """V = S + J+, S simétrica com entradas em [-2, 2] e J+ o triângulo superior da forma simplética padrão."""
    n = 2 * genus
    v = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            v[i][j] = v[j][i] = rng.randint(-2, 2)
    for i in range(genus):
        v[2 * i][2 * i + 1] += 1
    return validate_seifert(v)


def random_knot_braid(rng: random.Random, strands: int, length: int, negative: bool = False) -> BraidWord:
    """Sorteia palavras até o fecho ser um nó."""
    while True:
        letters = tuple(
            (-1 if negative or rng.random() < 0.5 else 1) * rng.randint(1, strands - 1) for _ in range(length)
        )
        word = BraidWord(strands, letters)
        if braid_closure_components(word) == 1:
            return word


def float_signature(v: SeifertMatrix, s: float) -> tuple[int, float]:
    """Oráculo em ponto flutuante: assinatura de (1 - w)V + (1 - conj(w))V^T e o menor |autovalor|."""
    m = np.array(v.matrix.to_lists(), dtype=float).reshape(v.size, v.size)
    w = np.exp(2j * np.pi * s)
    h = (1 - w) * m + (1 - np.conj(w)) * m.T
    eigenvalues = np.linalg.eigvalsh(h)
    return int(np.sum(eigenvalues > 0) - np.sum(eigenvalues < 0)), float(np.min(np.abs(eigenvalues)))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)

