"""
Códigos CSS a partir de códigos autoortogonais C ⊆ C⊥.

Inclui a construção (complemento de C até C⊥), os transversais de
entropia mínima / entropia condicional mínima / Hamming mínima, o mapa
de chave f(σ) = C + Σ σ_i h_i, o espectro de tipos e a busca aleatória
por códigos balanceados.
"""
import logging
import math
import threading
from dataclasses import dataclass, field as dc_field
from typing import Dict, Optional, Tuple

import numpy as np
import numpy.typing as npt
from scipy.special import entr

from .errors import CodeConstructionError, ErrorCode, UsageError
from .gfvec import (
    DEFAULT_ENUM_CAP,
    LinearCode,
    Word,
    all_words,
    check_cap,
    dual_basis,
    pivot_columns,
    random_in_span,
    rank,
    rref,
    solve_syndrome,
    span_words,
    syndrome,
    to_field,
    to_int,
    word_index,
)
from .models import DecodeRule, KeyDirection
from .typesys import TypeDist, type_class_size, type_count

logger = logging.getLogger(__name__)


def _sorted_entropy(words: npt.NDArray[np.int64], d: int) -> npt.NDArray[np.float64]:
    # contagens ordenadas: tipos com o mesmo multiconjunto dão exatamente o mesmo valor
    counts = np.stack([(words == a).sum(axis=1) for a in range(d)], axis=1)
    counts.sort(axis=1)
    return np.round(entr(counts / words.shape[1]).sum(axis=1) / math.log(d), 12)


def rule_objective(
    words: npt.NDArray[np.int64],
    d: int,
    rule: DecodeRule,
    second_half: Optional[npt.NDArray[np.bool_]] = None,
) -> npt.NDArray[np.float64]:
    """
    Valor minimizado pela regra de decodificação, palavra a palavra.
    """
    if rule is DecodeRule.MIN_HAMMING:
        return (words != 0).sum(axis=1).astype(np.float64)
    if rule is DecodeRule.MIN_ENTROPY:
        return _sorted_entropy(words, d)
    if second_half is None:
        raise UsageError("MIN_COND_ENTROPY exige a divisão em metades")
    first = _sorted_entropy(words[:, ~second_half], d)
    second = _sorted_entropy(words[:, second_half], d)
    return np.round((first + second) / 2.0, 12)


def lexicographic_argmin(words: npt.NDArray[np.int64], objective: npt.NDArray[np.float64]) -> int:
    """Índice do menor objetivo; empates vão para a menor palavra (posição 1 mais significativa)."""
    keys = [words[:, i] for i in range(words.shape[1] - 1, -1, -1)] + [objective]
    return int(np.lexsort(keys)[0])


def default_halves(n: int) -> npt.NDArray[np.bool_]:
    mask = np.zeros(n, dtype=bool)
    mask[n // 2:] = True
    return mask


@dataclass(eq=False)
class CssCode:
    """
    Código CSS (C, h_1..h_k, regra de decodificação).

    O transversal Γ nunca é materializado: representantes são calculados
    sob demanda e memorizados por síndrome.
    """
    code: LinearCode
    h_basis: npt.NDArray[np.int64]
    rule: DecodeRule = DecodeRule.MIN_ENTROPY
    second_half: Optional[npt.NDArray[np.bool_]] = None
    enum_cap: int = DEFAULT_ENUM_CAP
    permutation: Optional[npt.NDArray[np.int64]] = None
    base: Optional["CssCode"] = None
    dual: LinearCode = dc_field(init=False)
    _memo: Dict[Tuple[int, ...], Word] = dc_field(init=False, default_factory=dict, repr=False)
    _lock: threading.Lock = dc_field(init=False, default_factory=threading.Lock, repr=False)

    def __post_init__(self) -> None:
        self.dual = dual_basis(self.code)
        stacked = np.vstack([self.code.basis, self.h_basis])
        self._stacked = stacked
        if stacked.shape[0]:
            reduced = rref(stacked, self.d)
            self._key_pivots = pivot_columns(reduced)
            self._key_inverse = to_int(np.linalg.inv(to_field(stacked[:, self._key_pivots], self.d)))
        else:
            self._key_pivots = []
            self._key_inverse = np.zeros((0, 0), dtype=np.int64)

    @property
    def d(self) -> int:
        return self.code.d

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def kappa(self) -> int:
        return self.code.kappa

    @property
    def k(self) -> int:
        return int(self.h_basis.shape[0])

    def permuted(self, permutation: npt.ArrayLike) -> "CssCode":
        """
        Código π(C) com π(x)_i = x_{p[i]}; o transversal é π(Γ).
        """
        perm = np.asarray(permutation, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(self.n)):
            raise UsageError("Permutação inválida")
        origin = self.base if self.base is not None else self
        if self.permutation is not None:
            perm = self.permutation[perm]
        return CssCode(
            code=LinearCode(d=self.d, n=self.n, basis=origin.code.basis[:, perm]),
            h_basis=origin.h_basis[:, perm],
            rule=origin.rule,
            second_half=None if origin.second_half is None else origin.second_half[perm],
            enum_cap=origin.enum_cap,
            permutation=perm,
            base=origin,
        )

    def memo_size(self) -> int:
        return len(self._memo)


def build_css(
    code: LinearCode,
    rule: DecodeRule = DecodeRule.MIN_ENTROPY,
    h_basis: Optional[npt.ArrayLike] = None,
    second_half: Optional[npt.ArrayLike] = None,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> CssCode:
    """
    Completa C até uma base de C⊥ com k = n − 2κ vetores h_i.

    Para d=2 exige n par e 1ⁿ ∈ C.
    """
    d, n = code.d, code.n
    if not code.is_self_orthogonal():
        raise CodeConstructionError("O código C não é autoortogonal", ErrorCode.NOT_SELF_ORTHOGONAL)
    if d == 2 and (n % 2 == 1 or not code.contains(np.ones(n, dtype=np.int64))):
        raise CodeConstructionError(
            f"Para d=2 é preciso n par e 1ⁿ ∈ C (n={n})", ErrorCode.D2_RULE_VIOLATION
        )
    k = n - 2 * code.kappa
    dual = dual_basis(code)
    if h_basis is None:
        rows = [r for r in code.basis]
        current = code.kappa
        for candidate in dual.basis:
            if current == n - code.kappa:
                break
            if rank(np.vstack(rows + [candidate]), d) > current:
                rows.append(candidate)
                current += 1
        h = np.array(rows[code.kappa:], dtype=np.int64).reshape(k, n)
    else:
        h = np.asarray(h_basis, dtype=np.int64).reshape(-1, n) % d
        if h.shape[0] != k:
            raise UsageError(f"Esperados k={k} vetores h, recebidos {h.shape[0]}")
        if k and np.any((code.basis @ h.T) % d):
            raise UsageError("Os vetores h precisam estar em C⊥")
        if rank(np.vstack([code.basis, h]), d) != code.kappa + k:
            raise UsageError("Os vetores h não completam C até uma base de C⊥")
    if rule is DecodeRule.MIN_COND_ENTROPY:
        halves = default_halves(n) if second_half is None else np.asarray(second_half, dtype=bool)
        if halves.shape != (n,):
            raise UsageError("Máscara de metades com comprimento errado")
    else:
        halves = None if second_half is None else np.asarray(second_half, dtype=bool)
    css = CssCode(code=code, h_basis=h, rule=rule, second_half=halves, enum_cap=enum_cap)
    logger.debug(f"Código CSS montado: d={d}, n={n}, kappa={code.kappa}, k={k}, rule={rule.value}")
    return css


def coset_representative(css: CssCode, syn: npt.ArrayLike) -> Word:
    """
    Palavra da coclasse de C⊥ com a síndrome dada que minimiza o objetivo
    da regra; empates resolvidos pela menor palavra em ordem lexicográfica.
    """
    syn = np.asarray(syn, dtype=np.int64).reshape(-1)
    if syn.size != css.kappa:
        raise UsageError(f"Síndrome de tamanho {syn.size}, esperado {css.kappa}")
    syn = syn % css.d
    key = tuple(int(x) for x in syn)
    cached = css._memo.get(key)
    if cached is not None:
        return cached.copy()
    if css.base is not None:
        rep = coset_representative(css.base, syn)[css.permutation]
    else:
        check_cap(css.d ** (css.n - css.kappa), css.enum_cap, "coclasse de C⊥")
        offset = solve_syndrome(css.code, syn)
        words = (span_words(css.dual.basis, css.d, css.n, css.enum_cap) + offset) % css.d
        objective = rule_objective(words, css.d, css.rule, css.second_half)
        rep = words[lexicographic_argmin(words, objective)]
        logger.debug(f"Representante calculado: syndrome={key}, rule={css.rule.value}")
    with css._lock:
        css._memo[key] = rep
    return rep.copy()


@dataclass
class GammaTable:
    """Representantes de todas as síndromes e a pertinência a Γ′ = Γ + C de cada palavra."""
    reps: npt.NDArray[np.int64]
    member: npt.NDArray[np.bool_]


def gamma_table(css: CssCode) -> GammaTable:
    """
    Classifica todas as d^n palavras de uma vez (usado pelos oráculos).
    """
    if css.base is not None:
        raise UsageError("gamma_table opera sobre o código base, não sobre π(C)")
    d, n = css.d, css.n
    words = all_words(d, n, css.enum_cap)
    sidx = word_index((words @ css.code.basis.T) % d, d)
    objective = rule_objective(words, d, css.rule, css.second_half)
    keys = [words[:, i] for i in range(n - 1, -1, -1)] + [objective, sidx]
    order = np.lexsort(keys)
    sorted_sidx = sidx[order]
    first = order[np.r_[True, sorted_sidx[1:] != sorted_sidx[:-1]]]
    reps = np.zeros((d ** css.kappa, n), dtype=np.int64)
    reps[sidx[first]] = words[first]
    with css._lock:
        for rep in words[first]:
            syn = tuple(int(x) for x in (rep @ css.code.basis.T) % d)
            css._memo.setdefault(syn, rep.copy())
    diff = (words - reps[sidx]) % d
    member = ~np.any((diff @ css.dual.basis.T) % d, axis=1)
    return GammaTable(reps=reps, member=member)


def in_gamma_prime(css: CssCode, error: Word) -> bool:
    """e ∈ Γ′ ⇔ e − rep(síndrome(e)) ∈ C."""
    error = np.asarray(error, dtype=np.int64) % css.d
    rep = coset_representative(css, syndrome(error, css.code))
    diff = (error - rep) % css.d
    return not np.any((css.dual.basis @ diff) % css.d)


def correctable(css: CssCode, e_x: Word, e_z: Word) -> bool:
    """O par de erros (e_x, e_z) é corrigível quando ambos estão em Γ′."""
    return in_gamma_prime(css, e_x) and in_gamma_prime(css, e_z)


@dataclass
class TypeSpectrum:
    d: int
    n: int
    kappa: int
    counts: Dict[TypeDist, int]

    def total(self) -> int:
        return sum(self.counts.values())

    def get(self, q: TypeDist) -> int:
        return self.counts.get(q, 0)


def type_spectrum(css: CssCode) -> TypeSpectrum:
    """Λ(Q, C⊥): quantas palavras de C⊥ têm cada tipo."""
    words = span_words(css.dual.basis, css.d, css.n, css.enum_cap)
    counts = np.stack([(words == a).sum(axis=1) for a in range(css.d)], axis=1)
    unique, freq = np.unique(counts, axis=0, return_counts=True)
    spectrum = {TypeDist(tuple(int(c) for c in row)): int(f) for row, f in zip(unique, freq)}
    return TypeSpectrum(d=css.d, n=css.n, kappa=css.kappa, counts=spectrum)


@dataclass
class BalanceVerdict:
    balanced: bool
    bound: float
    worst_ratio: float
    witness: Optional[TypeDist] = None


def is_balanced(css: CssCode, spectrum: Optional[TypeSpectrum] = None) -> BalanceVerdict:
    """
    Critério Λ(Q, C⊥)/|T_Q| ≤ |P_n|·d^{−κ+d−1} para todo Q diferente do tipo
    de 0ⁿ (e de 1ⁿ quando d=2).
    """
    spectrum = spectrum or type_spectrum(css)
    d, n = css.d, css.n
    bound = type_count(n, d) * float(d) ** (-css.kappa + d - 1)
    excluded = {TypeDist.point_mass(0, d, n)}
    if d == 2:
        excluded.add(TypeDist.point_mass(1, d, n))
    worst = 0.0
    for q in sorted(spectrum.counts, key=lambda t: t.counts):
        if q in excluded:
            continue
        ratio = spectrum.counts[q] / type_class_size(q)
        worst = max(worst, ratio)
        if ratio > bound:
            return BalanceVerdict(balanced=False, bound=bound, worst_ratio=ratio, witness=q)
    return BalanceVerdict(balanced=True, bound=bound, worst_ratio=worst)


def _extend_self_orthogonal(
    rows: list, d: int, n: int, kappa: int, rng: np.random.Generator, attempts: int
) -> bool:
    while len(rows) < kappa:
        current = LinearCode(d=d, n=n, basis=np.array(rows, dtype=np.int64).reshape(len(rows), n))
        dual = dual_basis(current)
        for _ in range(attempts):
            x = random_in_span(dual.basis, d, rng)
            if not np.any(x) or int(x @ x) % d != 0 or current.contains(x):
                continue
            rows.append(x)
            break
        else:
            return False
    return True


def search_balanced(
    d: int,
    n: int,
    kappa: int,
    rng: np.random.Generator,
    max_tries: int = 200,
    rule: DecodeRule = DecodeRule.MIN_ENTROPY,
    enum_cap: int = DEFAULT_ENUM_CAP,
    attempts_per_row: int = 64,
) -> CssCode:
    """
    Sorteia códigos autoortogonais (estendendo a base com vetores isotrópicos
    ortogonais ao span atual) até encontrar um que passe em is_balanced.
    """
    if kappa < 0 or 2 * kappa > n:
        raise UsageError(f"κ={kappa} precisa satisfazer 0 ≤ κ ≤ n/2 (n={n})")
    if d == 2 and (n % 2 == 1 or kappa < 1):
        raise UsageError(f"Para d=2 é preciso n par e κ ≥ 1 (n={n}, κ={kappa})")
    for tries in range(1, max_tries + 1):
        rows = [np.ones(n, dtype=np.int64)] if d == 2 else []
        if not _extend_self_orthogonal(rows, d, n, kappa, rng, attempts_per_row):
            continue
        code = LinearCode(d=d, n=n, basis=np.array(rows, dtype=np.int64).reshape(kappa, n))
        css = build_css(code, rule=rule, enum_cap=enum_cap)
        verdict = is_balanced(css)
        if verdict.balanced:
            logger.info(f"Código balanceado encontrado: d={d}, n={n}, kappa={kappa}, tries={tries}")
            return css
        logger.debug(f"Código descartado: tries={tries}, worst_ratio={verdict.worst_ratio:.4g}")
    logger.warning(f"Nenhum código balanceado: d={d}, n={n}, kappa={kappa}, tries={max_tries}")
    raise CodeConstructionError(
        f"Nenhum código balanceado após {max_tries} tentativas", ErrorCode.NOT_FOUND, tries=max_tries
    )


def encode_key(css: CssCode, sigma: npt.ArrayLike) -> Word:
    """f(σ): representante Σ σ_i h_i da coclasse C + Σ σ_i h_i."""
    sigma = np.asarray(sigma, dtype=np.int64).reshape(-1)
    if sigma.size != css.k:
        raise UsageError(f"Chave de tamanho {sigma.size}, esperado k={css.k}")
    if css.k == 0:
        return np.zeros(css.n, dtype=np.int64)
    return (sigma % css.d @ css.h_basis) % css.d


def decode_key(css: CssCode, word: Word) -> npt.NDArray[np.int64]:
    """σ único com word − Σ σ_i h_i ∈ C; exige word ∈ C⊥."""
    word = np.asarray(word, dtype=np.int64) % css.d
    if np.any(syndrome(word, css.code)):
        raise UsageError("decode_key exige uma palavra de C⊥")
    if not css._key_pivots:
        return np.zeros(0, dtype=np.int64)
    coeffs = (word[css._key_pivots] @ css._key_inverse) % css.d
    if np.any((coeffs @ css._stacked) % css.d != word):
        raise UsageError("Palavra fora do span de C⊥")
    return coeffs[css.kappa:]


def key_map(css: CssCode, direction: KeyDirection, payload: npt.ArrayLike) -> npt.NDArray[np.int64]:
    if direction is KeyDirection.ENCODE:
        return encode_key(css, payload)
    return decode_key(css, np.asarray(payload, dtype=np.int64))


@dataclass
class KeyTransmission:
    """Resultado da transmissão de uma chave por um bloco de código."""
    announced: npt.NDArray[np.int64]
    sigma: npt.NDArray[np.int64]
    sigma_prime: npt.NDArray[np.int64]
    agreed: bool
    error_in_gamma_prime: bool


def transmit_key(css: CssCode, alice: Word, bob: Word) -> KeyTransmission:
    """
    Alice anuncia a síndrome x′ de y; ambos usam x = rep(x′). Bob estima o
    erro pela coclasse de y′ − x e extrai a chave de u.
    """
    d = css.d
    alice = np.asarray(alice, dtype=np.int64) % d
    bob = np.asarray(bob, dtype=np.int64) % d
    announced = syndrome(alice, css.code)
    x = coset_representative(css, announced)
    sigma = decode_key(css, (alice - x) % d)
    w = (bob - x) % d
    estimate = coset_representative(css, (-syndrome(w, css.code)) % d)
    sigma_prime = decode_key(css, (w + estimate) % d)
    agreed = bool(np.array_equal(sigma, sigma_prime))
    in_gp = in_gamma_prime(css, (alice - bob) % d)
    if agreed != in_gp:
        logger.error(f"Concordância inconsistente com Γ′: agreed={agreed}, in_gamma_prime={in_gp}")
    return KeyTransmission(
        announced=announced, sigma=sigma, sigma_prime=sigma_prime, agreed=agreed, error_in_gamma_prime=in_gp
    )
