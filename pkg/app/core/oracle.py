"""
Oráculos de força bruta para tamanhos pequenos.

Servem de verdade de referência: censo do conjunto de códigos
autoortogonais, probabilidades de falha exatas por enumeração, identidade
do erro de decodificação na transmissão da chave, caudas de amostragem e
expoentes por grade densa independente.
"""
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt
from scipy.optimize import brentq, minimize
from scipy.special import rel_entr
from scipy.stats import norm

from ..config import AppConfig
from .csscode import CssCode, build_css, gamma_table, search_balanced, transmit_key
from .errors import ResourceLimitError, UsageError
from .exponents import (
    e_cond,
    e_gv,
    e_joint,
    estar,
    fidelity_bound_product_form,
    g_alpha,
)
from .gfvec import (
    DEFAULT_ENUM_CAP,
    LinearCode,
    all_words,
    dual_basis,
    field as gf_field,
    rref,
    rref_key,
    span_words,
    word_index,
)
from .models import EnsembleVariant
from .qudit import (
    channel_to_dist,
    mix_kraus,
    random_kraus_channel,
    spmixed_check,
    switch3_deviation,
    weyl_family_deviation,
    weyl_relation_deviations,
)
from .typesys import as_dist, as_joint, binary_entropy, marginals, type_count

logger = logging.getLogger(__name__)

CONFIDENCE = 0.99
JOINT_EXACT_CAP = 1 << 20


def wilson_interval(successes: int, total: int, confidence: float = CONFIDENCE) -> Tuple[float, float]:
    """Intervalo de Wilson para uma proporção binomial."""
    if total <= 0:
        return (0.0, 1.0)
    z = float(norm.ppf(1.0 - (1.0 - confidence) / 2.0))
    p = successes / total
    z2 = z * z
    denom = 1.0 + z2 / total
    center = (p + z2 / (2.0 * total)) / denom
    half = z * math.sqrt(p * (1.0 - p) / total + z2 / (4.0 * total * total)) / denom
    return max(0.0, center - half), min(1.0, center + half)


# Censo do conjunto de códigos


@dataclass
class EnsembleCensus:
    d: int
    n: int
    kappa: int
    variant: EnsembleVariant
    codes: List[LinearCode]
    containment: npt.NDArray[np.int64]  # |A_x| indexado pela ordem lexicográfica das palavras

    @property
    def size(self) -> int:
        return len(self.codes)


def enumerate_self_orthogonal(
    d: int,
    n: int,
    kappa: int,
    variant: EnsembleVariant = EnsembleVariant.ALL_SELF_ORTHOGONAL,
    cap: int = DEFAULT_ENUM_CAP,
) -> EnsembleCensus:
    """
    Todos os C autoortogonais de dimensão κ (ou, na variante CONTAINS_ALL_ONES,
    os que contêm 1ⁿ), por busca em largura sobre a dimensão: cada subespaço
    é estendido por vetores isotrópicos do seu dual e deduplicado pela RREF.
    """
    gf_field(d)
    if kappa < 0 or 2 * kappa > n:
        raise UsageError(f"κ={kappa} precisa satisfazer 0 ≤ κ ≤ n/2 (n={n})")
    if variant is EnsembleVariant.CONTAINS_ALL_ONES:
        if d != 2 or n % 2 or kappa < 1:
            raise UsageError("A variante CONTAINS_ALL_ONES exige d=2, n par e κ ≥ 1")
        level: Dict[Tuple[int, ...], npt.NDArray[np.int64]] = {
            rref_key(np.ones((1, n), dtype=np.int64), d): np.ones((1, n), dtype=np.int64)
        }
        dim = 1
    else:
        level = {(): np.zeros((0, n), dtype=np.int64)}
        dim = 0
    check_words = d ** n
    if check_words > cap:
        raise ResourceLimitError(f"Censo sobre F_{d}^{n}", cap)

    while dim < kappa:
        work = len(level) * d ** (n - dim)
        if work > cap:
            raise ResourceLimitError(f"Extensão de {len(level)} subespaços de dimensão {dim}", cap)
        nxt: Dict[Tuple[int, ...], npt.NDArray[np.int64]] = {}
        for basis in level.values():
            current = LinearCode(d=d, n=n, basis=basis)
            candidates = span_words(dual_basis(current).basis, d, n, cap)
            isotropic = candidates[(np.einsum("ij,ij->i", candidates, candidates) % d) == 0]
            for x in isotropic:
                if not np.any(x) or current.contains(x):
                    continue
                extended = rref(np.vstack([basis, x]), d)
                key = tuple(int(v) for v in extended.reshape(-1))
                if key not in nxt:
                    nxt[key] = extended
        level = nxt
        dim += 1
        logger.debug(f"Censo: d={d}, n={n}, dim={dim}, subespaços={len(level)}")

    codes = [LinearCode(d=d, n=n, basis=b) for b in level.values()]
    containment = np.zeros(d ** n, dtype=np.int64)
    for code in codes:
        dual_words = span_words(dual_basis(code).basis, d, n, cap)
        containment[word_index(dual_words, d)] += 1
    logger.info(f"Censo concluído: d={d}, n={n}, kappa={kappa}, variant={variant.value}, codes={len(codes)}")
    return EnsembleCensus(d=d, n=n, kappa=kappa, variant=variant, codes=codes, containment=containment)


@dataclass
class SymmetryReport:
    constants: Dict[int, int]
    constant_per_class: bool
    ratio_bound: float
    worst_ratio: float
    ratio_ok: bool
    double_count_ok: bool
    zero_for_odd: bool
    violations: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.constant_per_class and self.ratio_ok and self.double_count_ok and self.zero_for_odd


def verify_group_symmetry(census: EnsembleCensus) -> SymmetryReport:
    """
    |A_x| constante em cada classe {x ≠ 0 : x·x = u}, razão
    |A_x|/|A_so| ≤ d^{−κ+d−1} e contagem dupla Σ_x |A_x| = |A_so|(d^{n−κ} − 1).
    """
    if census.size == 0:
        raise UsageError("Censo vazio")
    d, n, kappa = census.d, census.n, census.kappa
    words = all_words(d, n)
    norms = np.einsum("ij,ij->i", words, words) % d
    applicable = np.any(words != 0, axis=1)
    lemma5 = census.variant is EnsembleVariant.CONTAINS_ALL_ONES
    if lemma5:
        applicable &= ~np.all(words == 1, axis=1)

    violations: List[str] = []
    constants: Dict[int, int] = {}
    for u in range(d):
        cls = applicable & (norms == u)
        if not np.any(cls):
            continue
        values = np.unique(census.containment[cls])
        if values.size != 1:
            violations.append(f"classe u={u} com |A_x| ∈ {values.tolist()}")
        constants[u] = int(values[0])

    zero_for_odd = True
    if lemma5:
        odd = norms == 1
        zero_for_odd = not np.any(census.containment[odd])
        if not zero_for_odd:
            violations.append("|A_x| > 0 para x·x = 1")

    bound = float(d) ** (-kappa + d - 1)
    ratios = census.containment[applicable] / census.size
    worst = float(ratios.max()) if ratios.size else 0.0
    ratio_ok = worst <= bound + 1e-12
    if not ratio_ok:
        violations.append(f"razão {worst:.6g} > {bound:.6g}")

    total = int(census.containment[np.any(words != 0, axis=1)].sum())
    double_count_ok = total == census.size * (d ** (n - kappa) - 1)
    if not double_count_ok:
        violations.append(f"contagem dupla {total} != {census.size * (d ** (n - kappa) - 1)}")

    report = SymmetryReport(
        constants=constants,
        constant_per_class=not any(v.startswith("classe") for v in violations),
        ratio_bound=bound,
        worst_ratio=worst,
        ratio_ok=ratio_ok,
        double_count_ok=double_count_ok,
        zero_for_odd=zero_for_odd,
        violations=violations,
    )
    logger.info(f"Simetria do conjunto: d={d}, n={n}, kappa={kappa}, constants={constants}, passed={report.passed}")
    return report


# Probabilidades de falha


def _product_vector(position_dists: Sequence[npt.NDArray[np.float64]]) -> npt.NDArray[np.float64]:
    vec = np.ones(1)
    for p in position_dists:
        vec = np.kron(vec, p)
    return vec


def exact_marginal_failure(css: CssCode, position_dists: npt.ArrayLike) -> float:
    """
    Probabilidade de o erro (com distribuição própria em cada posição) cair
    fora de Γ′. Aceita uma única distribuição (i.i.d.) ou uma matriz n × d.
    """
    dists = np.asarray(position_dists, dtype=np.float64)
    if dists.ndim == 1:
        dists = np.tile(dists, (css.n, 1))
    if dists.shape != (css.n, css.d):
        raise UsageError(f"Distribuições por posição com forma {dists.shape}, esperado {(css.n, css.d)}")
    table = gamma_table(css)
    probs = _product_vector(dists)
    return float(np.clip(probs[~table.member].sum(), 0.0, 1.0))


@dataclass
class FailureProbabilities:
    joint: Optional[float]
    marginal_x: float
    marginal_z: float
    union_ok: bool
    fidelity_bound: Optional[float] = None
    fidelity_ok: Optional[bool] = None


def exact_failure_probability(
    css: CssCode, dist: npt.ArrayLike, exponent: Optional[float] = None
) -> FailureProbabilities:
    """
    P^n(K(Γ′)ᶜ) por enumeração de pares (s, t), e as marginais P̄ⁿ(Γ′ᶜ),
    P̿ⁿ(Γ′ᶜ). A conjunta só é calculada quando d^{2n} ≤ 2^20.
    """
    joint_dist = as_joint(dist, css.d)
    pbar, pdbar = marginals(joint_dist)
    table = gamma_table(css)
    marginal_x = float(np.clip(_product_vector([pbar] * css.n)[~table.member].sum(), 0.0, 1.0))
    marginal_z = float(np.clip(_product_vector([pdbar] * css.n)[~table.member].sum(), 0.0, 1.0))
    joint: Optional[float] = None
    if css.d ** (2 * css.n) <= JOINT_EXACT_CAP:
        full = np.ones((1, 1))
        for _ in range(css.n):
            full = np.kron(full, joint_dist)
        g = table.member.astype(np.float64)
        joint = float(np.clip(1.0 - g @ full @ g, 0.0, 1.0))
    else:
        logger.debug(f"Conjunta não enumerável: d={css.d}, n={css.n}; apenas marginais")
    union_ok = joint is None or joint <= marginal_x + marginal_z + 1e-12
    result = FailureProbabilities(joint=joint, marginal_x=marginal_x, marginal_z=marginal_z, union_ok=union_ok)
    if exponent is not None and joint is not None:
        result.fidelity_bound = fidelity_bound_product_form(css.n, exponent, css.d)
        result.fidelity_ok = joint <= result.fidelity_bound + 1e-12
    if not union_ok:
        logger.error(f"Cota da união violada: joint={joint}, marginal_x={marginal_x}, marginal_z={marginal_z}")
    return result


def monte_carlo_failure(css: CssCode, dist: npt.ArrayLike, trials: int, rng: np.random.Generator) -> Tuple[int, int]:
    """Sorteia pares (s, t) i.i.d. e conta quantos caem fora de K(Γ′). Retorna (falhas, tentativas)."""
    joint_dist = as_joint(dist, css.d).reshape(-1)
    table = gamma_table(css)
    d, n = css.d, css.n
    failures = 0
    batch = 20_000
    done = 0
    while done < trials:
        size = min(batch, trials - done)
        idx = rng.choice(d * d, size=(size, n), p=joint_dist)
        ok = table.member[word_index(idx // d, d)] & table.member[word_index(idx % d, d)]
        failures += int(size - np.count_nonzero(ok))
        done += size
    return failures, trials


@dataclass
class IdentityCheck:
    exact: float
    frequency: float
    failures: int
    trials: int
    half_width: float
    within: bool


def decoding_error_identity_check(
    css: CssCode, pbar: npt.ArrayLike, trials: int, rng: np.random.Generator
) -> IdentityCheck:
    """
    Simula a transmissão da chave (y uniforme, síndrome anunciada,
    decodificação de Bob) e compara a frequência de chaves diferentes com
    P̄ⁿ(Γ′ᶜ) exato.
    """
    pbar = as_dist(pbar, css.d)
    exact = exact_marginal_failure(css, pbar)
    failures = 0
    for _ in range(trials):
        alice = rng.integers(0, css.d, size=css.n)
        error = rng.choice(css.d, size=css.n, p=pbar)
        result = transmit_key(css, alice, (alice - error) % css.d)
        failures += int(not result.agreed)
    freq = failures / trials
    lo, hi = wilson_interval(failures, trials)
    half = (hi - lo) / 2.0
    within = abs(freq - exact) <= 4.0 * half + 1e-12
    logger.info(f"Identidade de decodificação: exact={exact:.6g}, frequency={freq:.6g}, trials={trials}, within={within}")
    return IdentityCheck(exact=exact, frequency=freq, failures=failures, trials=trials, half_width=half, within=within)


# Caudas de amostragem


def sampling_tail_bound(eps: float, big_n: int, n: int, alphabet: int) -> float:
    """2|P_N(Y)|² d^{−N(g(α)ε)²/K_d} = 2·C(N+s−1, s−1)²·exp(−N(g(α)ε)²/2), α = (N−n)/N."""
    alpha = (big_n - n) / big_n
    g = float(g_alpha(alpha))
    return 2.0 * float(type_count(big_n, alphabet)) ** 2 * math.exp(-big_n * (g * eps) ** 2 / 2.0)


@dataclass
class TailCheck:
    eps: List[float]
    empirical: List[float]
    lower: List[float]
    bound: List[float]
    violations: int


def sampling_tail_check(
    alphabet: int,
    big_n: int,
    n: int,
    source: Optional[npt.ArrayLike],
    trials: int,
    rng: np.random.Generator,
    eps_grid: Sequence[float] = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.75, 1.0),
) -> TailCheck:
    """
    Compara Pr{||P_{Y′} − P_{Y″}||₁ ≥ ε} (Y′ = amostra uniforme de n posições,
    Y″ = o restante) com a cota. Violação só quando a cota fica abaixo do
    limite inferior de Wilson.
    """
    if not 0 < n < big_n:
        raise UsageError(f"sampling_tail_check exige 0 < n < N (n={n}, N={big_n})")
    y = rng.integers(0, alphabet, size=big_n) if source is None else np.asarray(source, dtype=np.int64)
    if y.size != big_n:
        raise UsageError(f"Sequência de origem com {y.size} símbolos, esperado N={big_n}")
    distances = np.empty(trials)
    for i in range(trials):
        mask = np.zeros(big_n, dtype=bool)
        mask[rng.choice(big_n, size=n, replace=False)] = True
        first = np.bincount(y[mask], minlength=alphabet) / n
        rest = np.bincount(y[~mask], minlength=alphabet) / (big_n - n)
        distances[i] = np.abs(first - rest).sum()
    report = TailCheck(eps=[], empirical=[], lower=[], bound=[], violations=0)
    for eps in eps_grid:
        hits = int(np.count_nonzero(distances >= eps - 1e-12))
        lo, _ = wilson_interval(hits, trials)
        bound = sampling_tail_bound(eps, big_n, n, alphabet)
        report.eps.append(float(eps))
        report.empirical.append(hits / trials)
        report.lower.append(lo)
        report.bound.append(bound)
        if bound < lo:
            report.violations += 1
    return report


# Expoentes por força bruta


def estar_dense(rate: float, p: npt.ArrayLike, step: float = 1e-4) -> float:
    """E*(R, p) binário numa grade uniforme de passo `step`."""
    p = as_dist(p, 2)
    q1 = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
    q = np.stack([1.0 - q1, q1], axis=1)
    div = rel_entr(q, p).sum(axis=1) / math.log(2.0)
    h = binary_entropy(q1)
    return float((div + 0.5 * np.maximum(1.0 - 2.0 * h - rate, 0.0)).min())


def _inverse_binary_entropy(y: float) -> float:
    if y <= 0.0:
        return 0.0
    if y >= 1.0:
        return 0.5
    return float(brentq(lambda x: binary_entropy(x) - y, 0.0, 0.5, xtol=1e-15))


def _tilted_divergence(p_flat: npt.NDArray[np.float64], stat: npt.NDArray[np.float64], target: float) -> float:
    """min D(Q||P) sujeito a E_Q[stat] = target, via Q ∝ P·exp(λ·stat)."""
    support = p_flat > 0
    lo, hi = float(stat[support].min()), float(stat[support].max())
    if target < lo - 1e-15 or target > hi + 1e-15:
        return math.inf
    if abs(target - lo) <= 1e-15 or abs(target - hi) <= 1e-15:
        mass = p_flat[support & np.isclose(stat, target)].sum()
        return float(-math.log2(mass))

    def tilted(lam: float) -> npt.NDArray[np.float64]:
        logits = np.where(support, np.log(np.where(support, p_flat, 1.0)) + lam * stat, -np.inf)
        logits -= logits.max()
        w = np.exp(logits)
        return w / w.sum()

    bound = 1.0
    while float(tilted(bound) @ stat) < target:
        bound *= 2.0
    low = -1.0
    while float(tilted(low) @ stat) > target:
        low *= 2.0
    lam = brentq(lambda x: float(tilted(x) @ stat) - target, low, bound, xtol=1e-14)
    q = tilted(lam)
    return float(rel_entr(q, p_flat).sum() / math.log(2.0))


def egv_tilting(rate: float, p_m: npt.ArrayLike) -> float:
    """
    E_GV(R, P_M) exato: a estatística Q̄(1)+Q̿(1) é linear em Q, então o
    mínimo sobre o complemento da região viável é atingido por inclinação
    exponencial em um dos extremos s₀, 1 − s₀ ou 1.
    """
    p_flat = as_joint(p_m, 2).reshape(-1)
    stat = np.array([0.0, 1.0, 1.0, 2.0])
    s0 = _inverse_binary_entropy((1.0 - rate) / 2.0)
    mean = float(p_flat @ stat)
    if mean >= 1.0 or s0 <= mean <= 1.0 - s0:
        return 0.0
    return min(_tilted_divergence(p_flat, stat, t) for t in (s0, 1.0 - s0, 1.0))


def econd_dense(rate: float, p0: npt.ArrayLike, p1: npt.ArrayLike, step: float = 1e-3) -> float:
    """
    E_c binário por grade de passo `step` nas duas variáveis, polida com Nelder–Mead.
    """
    j0 = as_joint(p0, 2)
    j1 = as_joint(p1, 2)
    bar0, dbar0 = marginals(j0)
    bar1, dbar1 = marginals(j1)
    return min(_estar_pair_dense(rate, bar0, bar1, step), _estar_pair_dense(rate, dbar0, dbar1, step))


def _estar_pair_dense(rate: float, a: npt.NDArray[np.float64], b: npt.NDArray[np.float64], step: float) -> float:
    u = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)

    def parts(x: npt.NDArray[np.float64], p: npt.NDArray[np.float64]) -> Tuple[np.ndarray, np.ndarray]:
        q = np.stack([1.0 - x, x], axis=-1)
        return rel_entr(q, p).sum(axis=-1) / math.log(2.0), binary_entropy(x)

    da, ha = parts(u, a)
    db, hb = parts(u, b)
    grid = (da[:, None] + db[None, :] + np.maximum(1.0 - ha[:, None] - hb[None, :] - rate, 0.0)) / 2.0
    i, j = np.unravel_index(int(np.argmin(grid)), grid.shape)
    best = float(grid[i, j])

    def objective(v: npt.NDArray[np.float64]) -> float:
        x = np.clip(v, 0.0, 1.0)
        dx, hx = parts(x[:1], a)
        dy, hy = parts(x[1:], b)
        return float((dx[0] + dy[0] + max(1.0 - hx[0] - hy[0] - rate, 0.0)) / 2.0)

    res = minimize(objective, x0=np.array([u[i], u[j]]), method="Nelder-Mead",
                   options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 2000})
    return min(best, float(res.fun))


# Suíte de verificação


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    elapsed: float = 0.0


def _timed(name: str, check: Callable[[], Tuple[bool, str]]) -> CheckResult:
    start = time.perf_counter()
    try:
        passed, detail = check()
    except Exception as e:
        logger.error(f"Falha inesperada na verificação {name}: {type(e).__name__}: {e}", exc_info=True)
        passed, detail = False, f"{type(e).__name__}: {e}"
    elapsed = time.perf_counter() - start
    log = logger.info if passed else logger.warning
    log(f"Verificação {name}: passed={passed}, elapsed={elapsed:.2f}s, detail={detail}")
    return CheckResult(name=name, passed=passed, detail=detail, elapsed=elapsed)


def run_verify_suite(quick: bool = False, seed: int = 2024, config: Optional[AppConfig] = None) -> List[CheckResult]:
    """
    Executa todos os oráculos. `quick` reduz tentativas, instâncias e sessões
    para caber em poucos segundos; `config` define as grades usadas pelas
    sessões ponta a ponta.
    """
    config = config or AppConfig()
    rng = np.random.default_rng(seed)
    results: List[CheckResult] = []

    def ensemble() -> Tuple[bool, str]:
        cases = [
            (3, 4, 1, EnsembleVariant.ALL_SELF_ORTHOGONAL),
            (2, 4, 1, EnsembleVariant.CONTAINS_ALL_ONES),
            (2, 4, 2, EnsembleVariant.CONTAINS_ALL_ONES),
            (2, 6, 1, EnsembleVariant.CONTAINS_ALL_ONES),
            (2, 6, 2, EnsembleVariant.CONTAINS_ALL_ONES),
        ]
        details = []
        ok = True
        for d, n, kappa, variant in cases:
            report = verify_group_symmetry(enumerate_self_orthogonal(d, n, kappa, variant))
            ok &= report.passed
            details.append(f"({d},{n},{kappa}):{report.constants}")
        return ok, " ".join(details)

    def fidelity() -> Tuple[bool, str]:
        lengths = (8,) if quick else (8, 12, 16)
        violations = 0
        worst = 0.0
        for n in lengths:
            css = search_balanced(2, n, 2, rng)
            rate = css.k / n
            for q in (0.01, 0.03, 0.05):
                dist = np.array([[1.0 - q, q], [0.0, 0.0]])
                pbar, pdbar = marginals(dist)
                exponent = e_joint(rate, pbar, pdbar).value
                bound = fidelity_bound_product_form(n, exponent, 2)
                if n <= 10:
                    failure = exact_failure_probability(css, dist).joint or 0.0
                else:
                    fails, trials = monte_carlo_failure(css, dist, 10 ** 5 if quick else 10 ** 6, rng)
                    failure = fails / trials
                worst = max(worst, failure / bound if bound > 0 else math.inf)
                violations += int(failure > bound)
        return violations == 0, f"violations={violations}, worst_ratio={worst:.3g}"

    def exponent_oracles() -> Tuple[bool, str]:
        instances = 3 if quick else 20
        worst = 0.0
        for _ in range(instances):
            rate = float(rng.uniform(0.0, 1.0))
            p1 = float(rng.uniform(0.0, 0.3))
            worst = max(worst, abs(estar(rate, [1.0 - p1, p1]).value - estar_dense(rate, [1.0 - p1, p1])))
            joint = rng.dirichlet(np.full(4, 0.5)) * 0.3 + np.array([0.7, 0.0, 0.0, 0.0])
            worst = max(worst, abs(e_gv(rate, joint.reshape(2, 2)).value - egv_tilting(rate, joint)))
            other = rng.dirichlet(np.full(4, 0.5)) * 0.3 + np.array([0.7, 0.0, 0.0, 0.0])
            worst = max(
                worst,
                abs(e_cond(rate, joint.reshape(2, 2), other.reshape(2, 2)).value - econd_dense(rate, joint, other)),
            )
        return worst <= 1e-4, f"max_abs_diff={worst:.3g}"

    def threshold() -> Tuple[bool, str]:
        q_star = _inverse_binary_entropy(0.5)
        mismatches = 0
        for q in np.linspace(0.02, 0.2, 10 if quick else 40):
            for rate in (0.05, 0.2, 0.5):
                positive = estar(rate, [1.0 - q, q]).value > 1e-7
                expected = rate < 1.0 - 2.0 * float(binary_entropy(q))
                margin = abs(rate - (1.0 - 2.0 * float(binary_entropy(q))))
                mismatches += int(positive != expected and margin > 0.02)
        ok = abs(q_star - 0.11) <= 5e-4 and mismatches == 0
        return ok, f"q_star={q_star:.6f}, mismatches={mismatches}"

    def switch3() -> Tuple[bool, str]:
        count = 10 if quick else 100
        worst = 0.0
        for d in (2, 3):
            for _ in range(count):
                ch = random_kraus_channel(d, int(rng.integers(1, d * d + 1)), rng)
                worst = max(worst, switch3_deviation(ch))
                mixed = mix_kraus(ch, rng)
                worst = max(worst, float(np.abs(channel_to_dist(mixed) - channel_to_dist(ch)).max()))
        return worst <= 1e-10, f"max_dev={worst:.3g}"

    def weyl() -> Tuple[bool, str]:
        worst = max(max(weyl_relation_deviations(d)) for d in (2, 3, 5))
        worst = max(worst, max(weyl_family_deviation(d) for d in (2, 3, 5)))
        return worst <= 1e-10, f"max_dev={worst:.3g}"

    def spmixed() -> Tuple[bool, str]:
        code = LinearCode.from_rows(["1111"], 2)
        worst = 0.0
        for x, v in (("0000", "0000"), ("1100", "1010"), ("0110", "0001")):
            worst = max(worst, spmixed_check(code, np.array([int(c) for c in x]), np.array([int(c) for c in v])))
        return worst <= 1e-10, f"max_dev={worst:.3g}"

    def identity() -> Tuple[bool, str]:
        trials = 4000 if quick else 10 ** 5
        code = LinearCode.from_rows(["1111"], 2)
        small = build_css(code)
        ok = True
        details = []
        for css, pbar in ((small, [0.9, 0.1]), (search_balanced(2, 8, 2, rng), [0.95, 0.05])):
            report = decoding_error_identity_check(css, pbar, trials, rng)
            ok &= report.within
            details.append(f"exact={report.exact:.4g}/freq={report.frequency:.4g}")
        return ok, " ".join(details)

    def tails() -> Tuple[bool, str]:
        trials = 2000 if quick else 20000
        total = 0
        cases = [
            (2, 40, 20, np.array([0] * 20 + [1] * 20)),
            (2, 40, 10, None),
            (3, 30, 10, None),
            (3, 30, 15, np.arange(30) % 3),
        ]
        for s, big_n, n, source in cases:
            total += sampling_tail_check(s, big_n, n, source, trials, rng).violations
        return total == 0, f"violations={total}"

    def protocol() -> Tuple[bool, str]:
        from .engine import protocol_agreement_check

        check = protocol_agreement_check(config, quick=quick, seed=seed)
        return check.passed, check.detail()

    for name, check in (
        ("ensemble_symmetry", ensemble),
        ("fidelity_bound", fidelity),
        ("exponent_oracles", exponent_oracles),
        ("threshold", threshold),
        ("switch3_trace_formula", switch3),
        ("weyl_relations", weyl),
        ("spmixed_identity", spmixed),
        ("decoding_error_identity", identity),
        ("sampling_tails", tails),
        ("protocol_end_to_end", protocol),
    ):
        results.append(_timed(name, check))
    return results
