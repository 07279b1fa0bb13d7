"""
Método dos tipos: tipos empíricos, entropia e divergência na base d,
contagem de classes de tipo e álgebra de distribuições conjuntas.

Distribuições são arrays numpy (Dist: vetor; JointDist: matriz s × s com
J[s, t] = P(X^s Z^t)). Tipos usam contagens inteiras (TypeDist).
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
import numpy.typing as npt
from scipy.special import entr, gammaln, rel_entr, xlogy

from .errors import ResourceLimitError, UsageError
from .gfvec import DEFAULT_ENUM_CAP, Word

logger = logging.getLogger(__name__)

Dist = npt.NDArray[np.float64]
JointDist = npt.NDArray[np.float64]

PROB_TOL = 1e-12


@dataclass(frozen=True)
class TypeDist:
    """
    Tipo empírico com denominador n: counts[i] = ocorrências do símbolo i.
    Imutável e hashable, usado como chave do espectro de tipos.
    """
    counts: Tuple[int, ...]

    def __post_init__(self) -> None:
        if any(c < 0 for c in self.counts):
            raise UsageError(f"Contagens negativas em {self.counts}")
        if sum(self.counts) < 1:
            raise UsageError("Tipo com denominador zero")

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def size(self) -> int:
        return len(self.counts)

    def probs(self) -> Dist:
        return np.asarray(self.counts, dtype=np.float64) / self.n

    @classmethod
    def point_mass(cls, symbol: int, size: int, n: int) -> "TypeDist":
        counts = [0] * size
        counts[symbol] = n
        return cls(tuple(counts))


def as_dist(p: npt.ArrayLike, size: int | None = None) -> Dist:
    """
    Valida uma distribuição: entradas ≥ 0 e soma 1 (tolerância 1e-12).
    """
    arr = np.asarray(p, dtype=np.float64).reshape(-1)
    if size is not None and arr.size != size:
        raise UsageError(f"Distribuição de tamanho {arr.size}, esperado {size}")
    if arr.size == 0 or np.any(arr < -PROB_TOL) or abs(arr.sum() - 1.0) > 1e-9:
        raise UsageError(f"Distribuição inválida: {arr.tolist()}")
    return np.clip(arr, 0.0, None) / np.clip(arr, 0.0, None).sum()


def as_joint(j: npt.ArrayLike, d: int | None = None) -> JointDist:
    arr = np.asarray(j, dtype=np.float64)
    if arr.ndim == 1:
        side = int(round(math.isqrt(arr.size)))
        if side * side != arr.size:
            raise UsageError(f"Distribuição conjunta com {arr.size} entradas não é quadrada")
        arr = arr.reshape(side, side)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise UsageError(f"Distribuição conjunta com forma {arr.shape}")
    if d is not None and arr.shape[0] != d:
        raise UsageError(f"Distribuição conjunta {arr.shape} para d={d}")
    return as_dist(arr).reshape(arr.shape)


def type_of(word: Word, d: int) -> TypeDist:
    word = np.asarray(word, dtype=np.int64)
    if word.size == 0:
        raise UsageError("Tipo de palavra vazia")
    return TypeDist(tuple(int(c) for c in np.bincount(word, minlength=d)[:d]))


def entropy(p: npt.ArrayLike, base: float) -> float:
    """H(p) = −Σ p log_base p, com 0·log 0 = 0."""
    return float(entr(np.asarray(p, dtype=np.float64)).sum() / math.log(base))


def entropy_rows(rows: npt.NDArray[np.float64], base: float) -> npt.NDArray[np.float64]:
    return entr(rows).sum(axis=-1) / math.log(base)


def binary_entropy(x: npt.ArrayLike) -> npt.NDArray[np.float64] | float:
    """h₂(x) na base 2."""
    x = np.asarray(x, dtype=np.float64)
    value = (entr(x) + entr(1.0 - x)) / math.log(2.0)
    return float(value) if value.ndim == 0 else value


def kl(q: npt.ArrayLike, p: npt.ArrayLike, base: float) -> float:
    """
    D(q||p) = Σ q log_base(q/p); +∞ quando supp(q) ⊄ supp(p).
    """
    q = np.asarray(q, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if q.shape != p.shape:
        raise UsageError(f"Alfabetos diferentes: {q.shape} != {p.shape}")
    return float(max(rel_entr(q, p).sum(), 0.0) / math.log(base))


def kl_rows(rows: npt.NDArray[np.float64], p: npt.NDArray[np.float64], base: float) -> npt.NDArray[np.float64]:
    """D(Q_i||p) para cada linha Q_i (p pode ter a mesma forma das linhas ou ser broadcast)."""
    return np.maximum(rel_entr(rows, p).sum(axis=-1), 0.0) / math.log(base)


def type_count(n: int, s: int) -> int:
    """|P_n| para alfabeto de tamanho s: C(n+s−1, s−1)."""
    return math.comb(n + s - 1, s - 1)


def enumerate_types(n: int, s: int, cap: int = DEFAULT_ENUM_CAP) -> List[TypeDist]:
    """
    Todas as composições de n em s partes, em ordem lexicográfica das contagens.
    """
    if n < 1 or s < 1:
        raise UsageError(f"enumerate_types exige n ≥ 1 e s ≥ 1 (n={n}, s={s})")
    total = type_count(n, s)
    if total > cap:
        raise ResourceLimitError(f"Enumeração de {total} tipos (n={n}, s={s})", cap)
    out: List[TypeDist] = []

    def _fill(prefix: List[int], remaining: int, slots: int) -> None:
        if slots == 1:
            out.append(TypeDist(tuple(prefix + [remaining])))
            return
        for c in range(remaining + 1):
            _fill(prefix + [c], remaining - c, slots - 1)

    _fill([], n, s)
    return out


def type_class_size(q: TypeDist) -> int:
    """|T_Q| = n! / Π counts_i! (inteiro exato)."""
    size = math.factorial(q.n)
    for c in q.counts:
        size //= math.factorial(c)
    return size


def log_type_class_size(q: TypeDist) -> float:
    counts = np.asarray(q.counts, dtype=np.float64)
    return float(gammaln(q.n + 1) - gammaln(counts + 1).sum())


def type_class_within_entropy_bound(q: TypeDist, base: float) -> bool:
    """Verifica |T_Q| ≤ base^{n H(Q)} em escala logarítmica."""
    return log_type_class_size(q) <= q.n * entropy(q.probs(), base) * math.log(base) + 1e-9


def prob_of_type_class(q: TypeDist, p: npt.ArrayLike) -> float:
    """
    pⁿ(T_Q) = |T_Q| Π p(i)^{counts_i}, calculado em escala logarítmica.
    """
    p = np.asarray(p, dtype=np.float64)
    if p.size != q.size:
        raise UsageError(f"Tipo de tamanho {q.size} com distribuição de tamanho {p.size}")
    counts = np.asarray(q.counts, dtype=np.float64)
    if np.any((p == 0) & (counts > 0)):
        return 0.0
    log_value = log_type_class_size(q) + float(xlogy(counts, p).sum())
    return float(math.exp(log_value))


def marginals(j: npt.ArrayLike) -> Tuple[Dist, Dist]:
    """
    (Q̄, Q̿): Q̄(i) = Σ_j J(i, j) e Q̿(i) = Σ_j J(j, i).
    """
    j = np.asarray(j, dtype=np.float64)
    return j.sum(axis=1), j.sum(axis=0)


def flip(q: npt.ArrayLike) -> Dist:
    """f(q)(t) = q(−t mod d)."""
    q = np.asarray(q, dtype=np.float64)
    return q[(-np.arange(q.size)) % q.size]


def fourier_relabel(j: npt.ArrayLike) -> JointDist:
    """P′(s, t) = P(t, −s mod d)."""
    j = np.asarray(j, dtype=np.float64)
    d = j.shape[0]
    s, t = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return j[t, (-s) % d]


def mixture_channel(p_a: npt.ArrayLike, r: float) -> JointDist:
    """
    (1−r)P_A + r P_A′, onde P_A′ é a distribuição do canal conjugado por Fourier.
    """
    if not 0.0 <= r <= 1.0:
        raise UsageError(f"r={r} fora de [0, 1]")
    p_a = as_joint(p_a)
    return (1.0 - r) * p_a + r * fourier_relabel(p_a)


def mixture_marginals(pbar: npt.ArrayLike, pdbar: npt.ArrayLike, r: float) -> Tuple[Dist, Dist]:
    """P̄_M = (1−r)P̄ + r f(P̿) e P̿_M = (1−r)P̿ + r P̄."""
    pbar = np.asarray(pbar, dtype=np.float64)
    pdbar = np.asarray(pdbar, dtype=np.float64)
    return (1.0 - r) * pbar + r * flip(pdbar), (1.0 - r) * pdbar + r * pbar


def pinsker_constant(d: int) -> float:
    """K_d = 2 ln d, a constante de Pinsker para divergência na base d."""
    return 2.0 * math.log(d)


def l1_and_pinsker(q: npt.ArrayLike, p: npt.ArrayLike, d: int) -> Tuple[float, bool]:
    q = np.asarray(q, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if q.shape != p.shape:
        raise UsageError(f"Alfabetos diferentes: {q.shape} != {p.shape}")
    l1 = float(np.abs(q - p).sum())
    return l1, kl(q, p, d) >= l1 * l1 / pinsker_constant(d) - 1e-12


def is_valid_dist(p: Sequence[float]) -> bool:
    arr = np.asarray(p, dtype=np.float64)
    return bool(arr.size and np.all(arr >= -PROB_TOL) and abs(arr.sum() - 1.0) <= 1e-9)
