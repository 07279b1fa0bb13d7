"""
Aritmética e álgebra linear sobre F_d = Z/dZ (d primo).

Palavras são arrays numpy 1-D de inteiros em {0..d-1}; códigos lineares
guardam uma base geradora (κ × n). Escalonamento, espaço nulo e inversas
usam o pacote `galois`; o restante é aritmética inteira mod d em numpy.
"""
import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple, Type

import galois
import numpy as np
import numpy.typing as npt

from .errors import ResourceLimitError, UsageError

logger = logging.getLogger(__name__)

Word = npt.NDArray[np.int64]

# 2^24 elementos; AppConfig.enum_cap sobrescreve
DEFAULT_ENUM_CAP = 1 << 24


@lru_cache(maxsize=None)
def field(d: int) -> Type[galois.FieldArray]:
    """
    Classe do corpo F_d. Levanta UsageError se d não for primo.
    """
    if d < 2 or not galois.is_prime(d):
        raise UsageError(f"O módulo d={d} precisa ser primo")
    return galois.GF(d)


def make_word(digits: Sequence[int] | str | npt.ArrayLike, d: int) -> Word:
    """
    Valida e converte dígitos para uma palavra de F_d^n.

    Aceita uma string de caracteres ('0110') ou uma sequência de inteiros.
    """
    field(d)
    if isinstance(digits, str):
        if not digits.isdigit():
            raise UsageError(f"Palavra com caracteres inválidos: {digits!r}")
        arr = np.array([int(ch) for ch in digits], dtype=np.int64)
    else:
        arr = np.asarray(digits, dtype=np.int64).reshape(-1)
    if arr.size < 1:
        raise UsageError("Palavra vazia")
    if arr.min() < 0 or arr.max() >= d:
        raise UsageError(f"Dígitos fora de [0, {d - 1}]: {arr.tolist()}")
    return arr


def word_to_str(word: Word) -> str:
    return "".join(str(int(x)) for x in word)


def _check_pair(u: Word, v: Word, d: int) -> None:
    if u.shape != v.shape:
        raise UsageError(f"Comprimentos diferentes: {u.shape[0]} != {v.shape[0]}")
    if u.size and (u.max() >= d or v.max() >= d or u.min() < 0 or v.min() < 0):
        raise UsageError(f"Palavras fora do módulo d={d}")


def dot(u: Word, v: Word, d: int) -> int:
    """Produto escalar Σ u_i v_i mod d."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    _check_pair(u, v, d)
    return int(np.dot(u, v) % d)


def to_field(rows: npt.ArrayLike, d: int) -> galois.FieldArray:
    return field(d)(np.asarray(rows, dtype=np.int64) % d)


def to_int(arr: galois.FieldArray) -> npt.NDArray[np.int64]:
    return arr.view(np.ndarray).astype(np.int64)


def rank(rows: npt.ArrayLike, d: int) -> int:
    rows = np.asarray(rows, dtype=np.int64)
    if rows.ndim != 2 or rows.shape[0] == 0:
        return 0
    return int(np.linalg.matrix_rank(to_field(rows, d)))


def rref(rows: npt.ArrayLike, d: int) -> npt.NDArray[np.int64]:
    """
    Forma escalonada reduzida (sem linhas nulas). O pivô é sempre a
    primeira coluna não nula, o que torna as bases reprodutíveis.
    """
    rows = np.asarray(rows, dtype=np.int64)
    if rows.shape[0] == 0:
        return rows.reshape(0, rows.shape[1] if rows.ndim == 2 else 0)
    reduced = to_int(to_field(rows, d).row_reduce())
    return reduced[np.any(reduced != 0, axis=1)]


def pivot_columns(reduced: npt.NDArray[np.int64]) -> List[int]:
    return [int(np.flatnonzero(row)[0]) for row in reduced]


@dataclass(frozen=True, eq=False)
class LinearCode:
    """
    Subespaço de F_d^n dado por κ linhas geradoras linearmente independentes.
    """
    d: int
    n: int
    basis: npt.NDArray[np.int64]

    def __post_init__(self) -> None:
        field(self.d)
        basis = np.asarray(self.basis, dtype=np.int64).reshape(-1, self.n) if self.n else None
        if self.n < 1 or basis is None:
            raise UsageError(f"Comprimento inválido n={self.n}")
        if basis.size and (basis.min() < 0 or basis.max() >= self.d):
            raise UsageError(f"Base com dígitos fora de F_{self.d}")
        if rank(basis, self.d) != basis.shape[0]:
            raise UsageError("As linhas geradoras não são linearmente independentes")
        basis = basis.copy()
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def kappa(self) -> int:
        return int(self.basis.shape[0])

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int] | str], d: int, n: Optional[int] = None) -> "LinearCode":
        words = [make_word(r, d) for r in rows]
        if n is None:
            if not words:
                raise UsageError("Código sem linhas precisa de n explícito")
            n = int(words[0].size)
        if any(w.size != n for w in words):
            raise UsageError("Linhas geradoras com comprimentos diferentes")
        basis = np.array(words, dtype=np.int64).reshape(len(words), n)
        return cls(d=d, n=n, basis=basis)

    def contains(self, word: Word) -> bool:
        word = np.asarray(word, dtype=np.int64)
        if word.shape != (self.n,):
            raise UsageError(f"Palavra de comprimento {word.size} para código de comprimento {self.n}")
        if not np.any(word):
            return True
        if self.kappa == 0:
            return False
        return rank(np.vstack([self.basis, word]), self.d) == self.kappa

    def same_space(self, other: "LinearCode") -> bool:
        if (self.d, self.n, self.kappa) != (other.d, other.n, other.kappa):
            return False
        return all(self.contains(row) for row in other.basis)

    def is_self_orthogonal(self) -> bool:
        if self.kappa == 0:
            return True
        return not np.any((self.basis @ self.basis.T) % self.d)

    def words(self, cap: int = DEFAULT_ENUM_CAP) -> npt.NDArray[np.int64]:
        """Todas as d^κ palavras do código (combinações lexicográficas dos coeficientes)."""
        return span_words(self.basis, self.d, self.n, cap)


def dual_basis(code: LinearCode) -> LinearCode:
    """
    Base de C⊥ = {y : x·y = 0 para todo x ∈ C}, com dim = n − κ.
    """
    if code.kappa == 0:
        return LinearCode(d=code.d, n=code.n, basis=np.eye(code.n, dtype=np.int64))
    if code.kappa == code.n:
        return LinearCode(d=code.d, n=code.n, basis=np.zeros((0, code.n), dtype=np.int64))
    null = to_int(to_field(code.basis, code.d).null_space())
    null = rref(null, code.d)
    logger.debug(f"Dual calculado: d={code.d}, n={code.n}, kappa={code.kappa}, dim_dual={null.shape[0]}")
    return LinearCode(d=code.d, n=code.n, basis=null)


def syndrome(word: Word, code: LinearCode) -> npt.NDArray[np.int64]:
    """
    Síndrome (⟨word, g_j⟩)_j; é o vetor nulo exatamente quando word ∈ C⊥.
    """
    word = np.asarray(word, dtype=np.int64)
    if word.shape != (code.n,):
        raise UsageError(f"Palavra de comprimento {word.size} para código de comprimento {code.n}")
    if word.size and (word.min() < 0 or word.max() >= code.d):
        raise UsageError(f"Palavra fora de F_{code.d}")
    return (code.basis @ word) % code.d


def solve_syndrome(code: LinearCode, target: npt.ArrayLike) -> Word:
    """
    Uma palavra fixa com a síndrome dada (nula fora das colunas pivô).
    """
    target = np.asarray(target, dtype=np.int64).reshape(-1) % code.d
    if target.size != code.kappa:
        raise UsageError(f"Síndrome de tamanho {target.size}, esperado {code.kappa}")
    word = np.zeros(code.n, dtype=np.int64)
    if code.kappa == 0:
        return word
    pivots = pivot_columns(rref(code.basis, code.d))
    square = to_field(code.basis[:, pivots], code.d)
    word[pivots] = to_int(np.linalg.inv(square) @ to_field(target, code.d))
    return word


def check_cap(count: int, cap: int, what: str) -> None:
    if count > cap:
        raise ResourceLimitError(f"Enumeração de {count} elementos em {what}", cap)


def coefficient_grid(d: int, k: int) -> npt.NDArray[np.int64]:
    """Todos os vetores de F_d^k em ordem lexicográfica (posição 1 mais significativa)."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    index = np.arange(d ** k, dtype=np.int64)
    powers = d ** np.arange(k - 1, -1, -1, dtype=np.int64)
    return (index[:, None] // powers[None, :]) % d


def all_words(d: int, n: int, cap: int = DEFAULT_ENUM_CAP) -> npt.NDArray[np.int64]:
    check_cap(d ** n, cap, f"F_{d}^{n}")
    return coefficient_grid(d, n)


def word_index(words: npt.ArrayLike, d: int) -> npt.NDArray[np.int64]:
    """Índice lexicográfico de cada palavra (inverso de all_words)."""
    words = np.asarray(words, dtype=np.int64)
    n = words.shape[-1]
    powers = d ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return words @ powers


def span_words(basis: npt.NDArray[np.int64], d: int, n: int, cap: int = DEFAULT_ENUM_CAP) -> npt.NDArray[np.int64]:
    k = int(basis.shape[0])
    check_cap(d ** k, cap, f"span de dimensão {k}")
    coeffs = coefficient_grid(d, k)
    if k == 0:
        return np.zeros((1, n), dtype=np.int64)
    return (coeffs @ basis) % d


def coset_words(code_dual_of: LinearCode, rep: Word, cap: int = DEFAULT_ENUM_CAP) -> npt.NDArray[np.int64]:
    """Matriz com as d^{n−κ} palavras rep + c, c ∈ C⊥."""
    rep = np.asarray(rep, dtype=np.int64)
    if rep.shape != (code_dual_of.n,):
        raise UsageError("Representante com comprimento incompatível")
    dual = dual_basis(code_dual_of)
    return (span_words(dual.basis, code_dual_of.d, code_dual_of.n, cap) + rep) % code_dual_of.d


def enumerate_coset(code_dual_of: LinearCode, rep: Word, cap: int = DEFAULT_ENUM_CAP) -> Iterator[Word]:
    """
    Gera cada palavra de rep + C⊥ exatamente uma vez.
    """
    size = code_dual_of.d ** (code_dual_of.n - code_dual_of.kappa)
    check_cap(size, cap, "coclasse de C⊥")
    rep = np.asarray(rep, dtype=np.int64)
    dual = dual_basis(code_dual_of)
    for coeffs in itertools.product(range(code_dual_of.d), repeat=dual.kappa):
        yield (np.asarray(coeffs, dtype=np.int64) @ dual.basis + rep) % code_dual_of.d


def rref_key(basis: npt.ArrayLike, d: int) -> Tuple[int, ...]:
    """Chave canônica de um subespaço (RREF achatada)."""
    reduced = rref(basis, d)
    return tuple(int(x) for x in reduced.reshape(-1))


def random_in_span(basis: npt.NDArray[np.int64], d: int, rng: np.random.Generator) -> Word:
    coeffs = rng.integers(0, d, size=basis.shape[0])
    return (coeffs @ basis) % d
