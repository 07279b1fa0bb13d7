"""
Expoentes de erro, cotas e taxas.

Todas as minimizações sobre simplexos usam uma grade determinística de
passo 1/G seguida de passes locais que reduzem o passo pela metade ao
redor do melhor ponto (busca de padrão em uma janela de ±4 passos).
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt
from scipy.optimize import minimize_scalar
from scipy.special import rel_entr, xlogy

from ..config import AppConfig
from .errors import ResourceLimitError, UsageError
from .gfvec import DEFAULT_ENUM_CAP, check_cap, coefficient_grid
from .models import RateAdvice
from .typesys import (
    Dist,
    TypeDist,
    as_dist,
    as_joint,
    binary_entropy,
    entropy,
    entropy_rows,
    kl,
    kl_rows,
    marginals,
    mixture_marginals,
    pinsker_constant,
    type_count,
)

logger = logging.getLogger(__name__)

DEFAULT_REFINE_PASSES = 12
LOCAL_WINDOW = 4
MAX_LOCAL_MOVES = 8
JOINT_WINDOW_LIMIT = 1 << 16
# pontos da grade × linhas avaliadas por lote em rate_thresholds
THRESHOLD_CHUNK = 1 << 19
# pares (Q0, Q1) × pontos da bola em pair_rate_thresholds
PAIR_THRESHOLD_WORK = 1 << 30
MIN_THRESHOLD_PAIR_GRID = 8

Objective = Callable[[List[npt.NDArray[np.float64]]], npt.NDArray[np.float64]]


@lru_cache(maxsize=1)
def _env_config() -> AppConfig:
    return AppConfig.load_from_env()


def default_grid(size: int) -> int:
    """Passo base 1/G quando nenhuma grade é informada (CSSQKD_GRID_* via AppConfig)."""
    return _env_config().grid_for(size)


def default_pair_grid(size: int) -> int:
    return _env_config().pair_grid_for(size)


@lru_cache(maxsize=None)
def simplex_grid(size: int, grid: int) -> npt.NDArray[np.float64]:
    """Pontos {c/G : c ∈ Z^size, c ≥ 0, Σc = G} (estrelas e barras)."""
    if size == 1:
        return np.ones((1, 1))
    check_cap(type_count(grid, size), DEFAULT_ENUM_CAP, f"grade do simplexo ({size} símbolos, G={grid})")
    bars = np.array(list(itertools.combinations(range(grid + size - 1), size - 1)), dtype=np.int64)
    edges = np.hstack([np.full((bars.shape[0], 1), -1), bars, np.full((bars.shape[0], 1), grid + size - 1)])
    points = (np.diff(edges, axis=1) - 1) / grid
    points.setflags(write=False)
    return points


@lru_cache(maxsize=None)
def zero_sum_window(
    size: int, width: int = LOCAL_WINDOW, budget: Optional[int] = None, cap: int = DEFAULT_ENUM_CAP
) -> npt.NDArray[np.int64]:
    """
    Vetores inteiros v com |v_i| ≤ width, Σv = 0 e ||v||₁ ≤ budget.

    Construídos coordenada a coordenada: prefixos cuja soma parcial não pode
    mais ser cancelada (pelas coordenadas restantes ou pelo orçamento ℓ1) são
    descartados antes de crescer, e a última coordenada é fixada em −Σ.
    """
    budget = size * width if budget is None else budget
    values = np.arange(-width, width + 1, dtype=np.int8)
    rows = np.zeros((1, 0), dtype=np.int8)
    sums = np.zeros(1, dtype=np.int64)
    norms = np.zeros(1, dtype=np.int64)
    for position in range(size - 1):
        check_cap(rows.shape[0] * values.size, cap, f"janela de {size} coordenadas (largura {width})")
        count = rows.shape[0]
        rows = np.hstack([np.repeat(rows, values.size, axis=0), np.tile(values, count)[:, None]])
        sums = np.repeat(sums, values.size) + np.tile(values.astype(np.int64), count)
        norms = np.repeat(norms, values.size) + np.tile(np.abs(values).astype(np.int64), count)
        remaining = size - position - 1
        keep = (np.abs(sums) <= remaining * width) & (norms + np.abs(sums) <= budget)
        rows, sums, norms = rows[keep], sums[keep], norms[keep]
    keep = (np.abs(sums) <= width) & (norms + np.abs(sums) <= budget)
    window = np.hstack([rows[keep], (-sums[keep]).astype(np.int8)[:, None]]).astype(np.int64)
    window.setflags(write=False)
    return window


def _evaluate(objective: Objective, factors: Sequence[npt.NDArray[np.float64]]) -> npt.NDArray[np.float64]:
    """Avalia o objetivo no produto cartesiano dos pontos de cada fator."""
    k = len(factors)
    shaped = []
    for i, pts in enumerate(factors):
        shape = [1] * k + [pts.shape[-1]]
        shape[i] = pts.shape[0]
        shaped.append(pts.reshape(shape))
    return np.asarray(objective(shaped), dtype=np.float64).reshape(-1)


def _unravel(index: int, factors: Sequence[npt.NDArray[np.float64]]) -> Tuple[npt.NDArray[np.float64], ...]:
    positions = np.unravel_index(index, tuple(f.shape[0] for f in factors))
    return tuple(f[p].copy() for f, p in zip(factors, positions))


def minimize_on_simplices(
    objective: Objective,
    sizes: Sequence[int],
    grid: int,
    refine_passes: int = DEFAULT_REFINE_PASSES,
    anchors: Sequence[Sequence[npt.ArrayLike]] = (),
) -> Tuple[float, Tuple[npt.NDArray[np.float64], ...], float]:
    """
    Minimiza `objective` sobre um produto de simplexos.

    `anchors` são pontos sempre avaliados (por exemplo a própria distribuição
    de referência). Retorna (valor, pontos, passo final).
    """
    factors = []
    for i, size in enumerate(sizes):
        pts = np.asarray(simplex_grid(size, grid))
        extra = [np.asarray(a[i], dtype=np.float64) for a in anchors]
        if extra:
            pts = np.vstack([pts] + [e.reshape(1, size) for e in extra])
        factors.append(pts)
    values = _evaluate(objective, factors)
    best_index = int(np.argmin(values))
    best_value = float(values[best_index])
    best = _unravel(best_index, factors)

    windows = [zero_sum_window(size) for size in sizes]
    # produto das janelas grande demais: um fator por vez
    joint_moves = math.prod(w.shape[0] for w in windows) <= JOINT_WINDOW_LIMIT
    groups = [list(range(len(sizes)))] if joint_moves else [[i] for i in range(len(sizes))]

    step = 1.0 / grid
    for _ in range(refine_passes):
        step /= 2.0
        for _ in range(MAX_LOCAL_MOVES):
            improved = False
            for group in groups:
                local = []
                for i, point in enumerate(best):
                    if i not in group:
                        local.append(point[None, :])
                        continue
                    cand = point[None, :] + step * windows[i]
                    cand = cand[np.all(cand >= -1e-15, axis=1)]
                    local.append(np.clip(cand, 0.0, None))
                values = _evaluate(objective, local)
                index = int(np.argmin(values))
                if values[index] < best_value:
                    best_value = float(values[index])
                    best = _unravel(index, local)
                    improved = True
            if not improved:
                break
    return best_value, best, step


def minimize_on_interval(
    func: Callable[[npt.NDArray[np.float64]], npt.NDArray[np.float64]],
    lo: float,
    hi: float,
    steps: int = 20000,
    refine_passes: int = DEFAULT_REFINE_PASSES,
    extra: Sequence[float] = (),
) -> Tuple[float, float]:
    """Versão 1-D: grade uniforme em [lo, hi] mais refinamento local."""
    xs = np.concatenate([np.linspace(lo, hi, steps + 1), np.asarray(extra, dtype=np.float64)])
    values = func(xs)
    index = int(np.argmin(values))
    best_x, best_value = float(xs[index]), float(values[index])
    step = (hi - lo) / steps
    offsets = np.arange(-LOCAL_WINDOW, LOCAL_WINDOW + 1, dtype=np.float64)
    for _ in range(refine_passes):
        step /= 2.0
        cand = np.clip(best_x + step * offsets, lo, hi)
        values = func(cand)
        index = int(np.argmin(values))
        if values[index] < best_value:
            best_x, best_value = float(cand[index]), float(values[index])
    return best_value, best_x


def _positive(t: npt.ArrayLike) -> npt.NDArray[np.float64]:
    return np.maximum(np.asarray(t, dtype=np.float64), 0.0)


def _pow(base: float, exponent: float) -> float:
    """base**exponent sem overflow (satura em +inf)."""
    log_value = exponent * math.log(base)
    if log_value > 700:
        return math.inf
    return math.exp(log_value)


@dataclass
class ExponentResult:
    value: float
    argmin: Tuple[Dist, ...]
    resolution: float

    def __post_init__(self) -> None:
        if self.value < 0:
            self.value = 0.0


def _resolve(size: int, grid: Optional[int], refine_passes: Optional[int]) -> Tuple[int, int]:
    return (grid or default_grid(size), DEFAULT_REFINE_PASSES if refine_passes is None else refine_passes)


def _check_rate(rate: float) -> None:
    if not 0.0 <= rate <= 1.0:
        raise UsageError(f"Taxa R={rate} fora de [0, 1]")


def estar(
    rate: float,
    p: npt.ArrayLike,
    base: Optional[int] = None,
    grid: Optional[int] = None,
    refine_passes: Optional[int] = None,
) -> ExponentResult:
    """
    E*(R, p) = min_Q [D(Q||p) + ½|1 − 2H(Q) − R|⁺], logaritmos na base d.
    """
    _check_rate(rate)
    p = as_dist(p)
    base = base or p.size
    grid, refine_passes = _resolve(p.size, grid, refine_passes)

    def objective(pts: List[npt.NDArray[np.float64]]) -> npt.NDArray[np.float64]:
        q = pts[0]
        return kl_rows(q, p, base) + 0.5 * _positive(1.0 - 2.0 * entropy_rows(q, base) - rate)

    value, argmin, step = minimize_on_simplices(objective, [p.size], grid, refine_passes, anchors=[[p]])
    return ExponentResult(value=value, argmin=argmin, resolution=step)


def o_n(n: int, d: int) -> float:
    """o(n) = 3(d−1) log_d(n+1) + log_d 2 + d."""
    return 3.0 * (d - 1) * math.log(n + 1, d) + math.log(2.0, d) + d


def fidelity_bound(n: int, exponent: float, d: int) -> float:
    """d^{−nE + o(n)}, sem truncar em 1."""
    return _pow(d, -n * exponent + o_n(n, d))


def fidelity_bound_product_form(n: int, exponent: float, d: int) -> float:
    """2·d^d·|P_n|³·d^{−nE} com |P_n| ≤ (n+1)^{d−1}."""
    return 2.0 * d ** d * float(n + 1) ** (3 * (d - 1)) * _pow(d, -n * exponent)


@dataclass
class JointExponent(ExponentResult):
    d: int = 2
    components: Tuple[float, float] = field(default=(0.0, 0.0))

    def fidelity_bound(self, n: int) -> float:
        return fidelity_bound(n, self.value, self.d)


def e_joint(
    rate: float,
    pbar: npt.ArrayLike,
    pdbar: npt.ArrayLike,
    grid: Optional[int] = None,
    refine_passes: Optional[int] = None,
) -> JointExponent:
    """E(R, P̄, P̿) = min{E*(R, P̄), E*(R, P̿)}."""
    pbar = as_dist(pbar)
    pdbar = as_dist(pdbar, pbar.size)
    first = estar(rate, pbar, grid=grid, refine_passes=refine_passes)
    second = estar(rate, pdbar, grid=grid, refine_passes=refine_passes)
    best = first if first.value <= second.value else second
    return JointExponent(
        value=best.value,
        argmin=best.argmin,
        resolution=best.resolution,
        d=pbar.size,
        components=(first.value, second.value),
    )


def gv_statistic(q: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Q̄(1) + Q̿(1) para conjuntas binárias achatadas na ordem (00, 01, 10, 11)."""
    return q[..., 1] + q[..., 2] + 2.0 * q[..., 3]


def gv_feasible(q: npt.NDArray[np.float64], rate: float) -> npt.NDArray[np.bool_]:
    s = gv_statistic(q)
    inside = np.clip(s, 0.0, 1.0)
    return (s >= 1.0) | (1.0 - 2.0 * binary_entropy(inside) <= rate)


def e_gv(
    rate: float,
    p_m: npt.ArrayLike,
    d: int = 2,
    grid: Optional[int] = None,
    refine_passes: Optional[int] = None,
) -> ExponentResult:
    """
    E_GV(R, P_M) = min D(Q||P_M) sobre Q com 1 − 2h(Q̄(1)+Q̿(1)) ≤ R ou Q̄(1)+Q̿(1) ≥ 1.
    Definido apenas para d=2.
    """
    if d != 2:
        raise UsageError("E_GV só está definido para d=2")
    _check_rate(rate)
    p_flat = as_joint(p_m, 2).reshape(-1)
    grid, refine_passes = _resolve(4, grid, refine_passes)

    def objective(pts: List[npt.NDArray[np.float64]]) -> npt.NDArray[np.float64]:
        q = pts[0]
        values = kl_rows(q, p_flat, 2)
        return np.where(gv_feasible(q, rate), values, np.inf)

    value, argmin, step = minimize_on_simplices(objective, [4], grid, refine_passes, anchors=[[p_flat]])
    return ExponentResult(value=value, argmin=(argmin[0].reshape(2, 2),), resolution=step)


def estar_pair(
    rate: float,
    p0: npt.ArrayLike,
    p1: npt.ArrayLike,
    base: Optional[int] = None,
    grid: Optional[int] = None,
    refine_passes: Optional[int] = None,
) -> ExponentResult:
    """
    E*(R, p0, p1) = min_{Q0,Q1} [D(Q0||p0) + D(Q1||p1) + |1 − H(Q0) − H(Q1) − R|⁺] / 2.
    """
    _check_rate(rate)
    p0 = as_dist(p0)
    p1 = as_dist(p1, p0.size)
    base = base or p0.size
    grid = grid or default_pair_grid(p0.size)
    refine_passes = DEFAULT_REFINE_PASSES if refine_passes is None else refine_passes

    def objective(pts: List[npt.NDArray[np.float64]]) -> npt.NDArray[np.float64]:
        q0, q1 = pts
        d0 = kl_rows(q0, p0, base)
        d1 = kl_rows(q1, p1, base)
        gap = 1.0 - entropy_rows(q0, base) - entropy_rows(q1, base) - rate
        return (d0 + d1 + _positive(gap)) / 2.0

    value, argmin, step = minimize_on_simplices(
        objective, [p0.size, p0.size], grid, refine_passes, anchors=[[p0, p1]]
    )
    return ExponentResult(value=value, argmin=argmin, resolution=step)


def e_cond(
    rate: float,
    p0: npt.ArrayLike,
    p1: npt.ArrayLike,
    grid: Optional[int] = None,
    refine_passes: Optional[int] = None,
) -> ExponentResult:
    """
    E_c = min{E*(R, P̄0, P̄1), E*(R, P̿0, P̿1)} para conjuntas P0, P1.
    """
    p0 = as_joint(p0)
    p1 = as_joint(p1, p0.shape[0])
    bar0, dbar0 = marginals(p0)
    bar1, dbar1 = marginals(p1)
    first = estar_pair(rate, bar0, bar1, grid=grid, refine_passes=refine_passes)
    second = estar_pair(rate, dbar0, dbar1, grid=grid, refine_passes=refine_passes)
    return first if first.value <= second.value else second


def theta(x: npt.ArrayLike, d: int) -> npt.NDArray[np.float64]:
    """θ(0)=0; θ(x) = −x log_d(x/d) em (0, 1/2]; θ = 1 acima de 1/2."""
    x = np.asarray(x, dtype=np.float64)
    middle = -(xlogy(x, x) - x * math.log(d)) / math.log(d)
    return np.where(x > 0.5, 1.0, np.where(x <= 0.0, 0.0, middle))


def g_alpha(alpha: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """g(α) = √(α(1−α)) / (√α + √(1−α))."""
    alpha = np.asarray(alpha, dtype=np.float64)
    return np.sqrt(alpha * (1.0 - alpha)) / (np.sqrt(alpha) + np.sqrt(1.0 - alpha))


def _epsilon_exponent(gamma: float, coefficient: float, d: int) -> float:
    kd = pinsker_constant(d)

    def func(eps: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        return coefficient * eps ** 2 / kd + _positive(gamma - theta(eps, d))

    value, _ = minimize_on_interval(func, 0.0, 2.0, extra=(0.5,))
    return max(value, 0.0)


def e1(gamma: float, alpha: float, d: int) -> float:
    """E1(γ, α) = min_{ε∈[0,2]} (1−α)⁻¹(g(α)ε)²/K_d + |γ − θ(ε)|⁺."""
    if gamma < 0 or not 0.0 < alpha < 1.0:
        raise UsageError(f"E1 exige γ ≥ 0 e α ∈ (0, 1) (γ={gamma}, α={alpha})")
    return _epsilon_exponent(gamma, float(g_alpha(alpha)) ** 2 / (1.0 - alpha), d)


def g_min(r0: float, r1: float) -> float:
    """G = min_{α∈[r0, r1]} (1−α)⁻¹ g(α)²."""

    def func(a: float) -> float:
        return float(g_alpha(a)) ** 2 / (1.0 - a)

    res = minimize_scalar(func, bounds=(r0, r1), method="bounded")
    return min(func(r0), func(r1), float(res.fun))


def e2(gamma: float, r0: float, r1: float, d: int) -> float:
    """E2(γ, r0, r1) = min_ε Gε²/K_d + |γ − θ(ε)|⁺."""
    if gamma < 0 or not 0.0 < r0 < r1 < 1.0:
        raise UsageError(f"E2 exige γ ≥ 0 e 0 < r0 < r1 < 1 (γ={gamma}, r0={r0}, r1={r1})")
    return _epsilon_exponent(gamma, g_min(r0, r1), d)


@dataclass
class SamplingExponents:
    g: float
    e1: float
    e2: float
    g_min: float
    theta_half: float


def sampling_exponents(gamma: float, alpha: float, r0: float, r1: float, d: int) -> SamplingExponents:
    return SamplingExponents(
        g=float(g_alpha(alpha)),
        e1=e1(gamma, alpha, d),
        e2=e2(gamma, r0, r1, d),
        g_min=g_min(r0, r1),
        theta_half=float(theta(0.5, d)),
    )


@dataclass
class LeakageBound:
    raw: float
    reported: float
    cap: float
    vanishing: bool


def leakage_raw(n: npt.ArrayLike, exponent: float, rate: float, d: int) -> npt.NDArray[np.float64]:
    """2·d^{−nE+o(n)}·[n(E+R) − o(n)], vetorizado em n."""
    n = np.asarray(n, dtype=np.float64)
    o = 3.0 * (d - 1) * np.log(n + 1) / math.log(d) + math.log(2.0, d) + d
    power = np.exp(np.minimum((-n * exponent + o) * math.log(d), 700.0))
    return 2.0 * power * (n * (exponent + rate) - o)


def leakage_bound(n: int, exponent: float, rate: float, d: int) -> LeakageBound:
    """
    Cota da informação de Eve. Quando d^{−nE+o(n)} > 1/2 a cota não se aplica
    e o valor reportado é o teto n·R (sinalizado como não evanescente).
    """
    if n < 1 or exponent < 0 or not 0.0 <= rate <= 1.0:
        raise UsageError(f"leakage_bound exige n ≥ 1, E ≥ 0 e R ∈ [0, 1] (n={n}, E={exponent}, R={rate})")
    cap = n * rate
    raw = float(leakage_raw(n, exponent, rate, d))
    if -n * exponent + o_n(n, d) > -math.log(2.0, d):
        return LeakageBound(raw=raw, reported=cap, cap=cap, vanishing=False)
    reported = min(max(raw, 0.0), cap)
    return LeakageBound(raw=raw, reported=reported, cap=cap, vanishing=raw < cap)


def leakage_monotone_threshold(exponent: float, rate: float, d: int, n_max: int = 100_000) -> Optional[int]:
    """Menor n tal que bound(2m) < bound(m) para todo m em [n, n_max]."""
    m = np.arange(1, n_max + 1, dtype=np.float64)
    decreasing = leakage_raw(2 * m, exponent, rate, d) < leakage_raw(m, exponent, rate, d)
    if not decreasing[-1]:
        return None
    failing = np.flatnonzero(~decreasing)
    return 1 if failing.size == 0 else int(failing[-1]) + 2


@dataclass
class RateReport:
    r: float
    sift_fraction: float
    pbar_m: Dist
    pdbar_m: Dist
    r_qkd: float
    r_mixture: float
    r_cond: float
    r_cond_raw: float
    r_modified: float


def _check_open_unit(**values: float) -> None:
    for name, value in values.items():
        if not 0.0 < value < 1.0:
            raise UsageError(f"{name}={value} fora de (0, 1)")


def sifting_ratio(p_a: float, p_b: float) -> float:
    """r = p_a p_b / (p_a p_b + (1−p_a)(1−p_b)): fração esperada de dígitos na base X."""
    return p_a * p_b / (p_a * p_b + (1.0 - p_a) * (1.0 - p_b))


def achievable_rates(p_a: float, p_b: float, p_c: float, p_a_dist: npt.ArrayLike) -> RateReport:
    _check_open_unit(p_a=p_a, p_b=p_b, p_c=p_c)
    joint = as_joint(p_a_dist)
    d = joint.shape[0]
    pbar, pdbar = marginals(joint)
    r = sifting_ratio(p_a, p_b)
    sift = 1.0 - p_a - p_b + 2.0 * p_a * p_b
    pbar_m, pdbar_m = mixture_marginals(pbar, pdbar, r)
    worst = max(entropy(pbar_m, d), entropy(pdbar_m, d))
    half_bar, half_dbar = mixture_marginals(pbar, pdbar, 0.5)
    worst_half = max(entropy(half_bar, d), entropy(half_dbar, d))
    cond_core = (1.0 - entropy(pbar, d) - entropy(pdbar, d)) / 2.0
    return RateReport(
        r=r,
        sift_fraction=sift,
        pbar_m=pbar_m,
        pdbar_m=pdbar_m,
        r_qkd=(1.0 - p_c) * sift * (1.0 - 2.0 * worst),
        r_mixture=(1.0 - 2.0 * worst_half) / 4.0,
        r_cond=(1.0 - p_c) * sift * cond_core,
        r_cond_raw=(1.0 - p_c) * cond_core,
        r_modified=(1.0 - p_a - p_b) * (1.0 - 2.0 * max(entropy(pbar, d), entropy(pdbar, d))),
    )


@dataclass
class RateSelection:
    rate: float
    advice: RateAdvice
    rate_step: float
    ball_points: int
    ball_step: float
    worst_alpha: float
    worst_pbar: Dist
    worst_pdbar: Dist
    exponent_at_rate: float
    failure_exponent: float
    failure_probability_bound: float
    label: str = "grid-certified"


def epsilon_ball(
    center: npt.ArrayLike, eps: float, steps: int, cap: int = DEFAULT_ENUM_CAP
) -> npt.NDArray[np.float64]:
    """Pontos π + (ε/steps)·v da bola ℓ1 de raio ε dentro do simplexo."""
    center = np.asarray(center, dtype=np.float64)
    if eps <= 0.0:
        return center[None, :].copy()
    offsets = zero_sum_window(center.size, steps, budget=steps, cap=cap)
    points = center[None, :] + (eps / steps) * offsets
    points = points[np.all(points >= -1e-15, axis=1)]
    return np.clip(points, 0.0, None)


def split_pi(points: npt.NDArray[np.float64], d: int) -> Tuple[npt.NDArray[np.float64], ...]:
    """π(0,x) = (1−α)p(x), π(1,x) = αq(x) ⟶ (α, p, q); condicionais indefinidas viram uniformes."""
    first, second = points[:, :d], points[:, d:]
    alpha = second.sum(axis=1)
    uniform = np.full(d, 1.0 / d)
    p = np.where((1.0 - alpha)[:, None] > 1e-15, first / np.maximum(1.0 - alpha, 1e-300)[:, None], uniform)
    q = np.where(alpha[:, None] > 1e-15, second / np.maximum(alpha, 1e-300)[:, None], uniform)
    return alpha, p, q


def rate_thresholds(dists: npt.NDArray[np.float64], target: float, grid: int) -> npt.NDArray[np.float64]:
    """
    R*(p) = sup{R : E*(R, p) ≥ E} = min sobre Q com D(Q||p) < E de 1 − 2H(Q) − 2E + 2D(Q||p).
    """
    d = dists.shape[1]
    q = np.vstack([simplex_grid(d, grid), dists])
    h = entropy_rows(q, d)
    out = np.empty(dists.shape[0])
    chunk = max(1, THRESHOLD_CHUNK // q.shape[0])
    for start in range(0, dists.shape[0], chunk):
        block = dists[start:start + chunk]
        div = np.maximum(rel_entr(q[None, :, :], block[:, None, :]).sum(axis=2), 0.0) / math.log(d)
        values = np.where(div < target, 1.0 - 2.0 * h[None, :] - 2.0 * target + 2.0 * div, np.inf)
        out[start:start + chunk] = values.min(axis=1)
    return np.minimum(out, 1.0)


def pair_rate_thresholds(
    p0: npt.NDArray[np.float64], p1: npt.NDArray[np.float64], target: float, grid: int
) -> npt.NDArray[np.float64]:
    """Análogo de rate_thresholds para E*(R, p0, p1): R ≤ 1 − H0 − H1 − 2E + D0 + D1."""
    d = p0.shape[1]
    q = simplex_grid(d, grid)
    h = entropy_rows(q, d)
    out = np.empty(p0.shape[0])
    for i in range(p0.shape[0]):
        qa = np.vstack([q, p0[i:i + 1]])
        qb = np.vstack([q, p1[i:i + 1]])
        ha = np.concatenate([h, entropy_rows(p0[i:i + 1], d)])
        hb = np.concatenate([h, entropy_rows(p1[i:i + 1], d)])
        da = kl_rows(qa, p0[i], d)
        db = kl_rows(qb, p1[i], d)
        total = da[:, None] + db[None, :]
        values = np.where(
            total < 2.0 * target, 1.0 - ha[:, None] - hb[None, :] - 2.0 * target + total, np.inf
        )
        out[i] = min(float(values.min()), 1.0)
    return out


def failure_exponent(center: npt.ArrayLike, eps: float, nu: int, d: int) -> float:
    """
    ν · min_{Q: ||Q − π||₁ ≥ ε} D(Q||π).

    ||Q − π||₁ = 2·max_A (Q(A) − π(A)), então o mínimo é o da divergência
    binária d(π(A) + ε/2 || π(A)) sobre os subconjuntos A do suporte de π,
    atingido reescalando π dentro de A e do complemento.
    """
    center = np.asarray(center, dtype=np.float64)
    if eps <= 0.0:
        return 0.0
    masses = np.unique(coefficient_grid(2, center.size) @ center)
    shifted = masses + eps / 2.0
    feasible = (masses > 0.0) & (shifted <= 1.0)
    if not np.any(feasible):
        return math.inf
    a, t = masses[feasible], shifted[feasible]
    div = (rel_entr(t, a) + rel_entr(1.0 - t, 1.0 - a)) / math.log(d)
    return nu * float(div.min())


def threshold_pair_grid(d: int, ball_points: int, pair_grid: Optional[int] = None) -> int:
    """
    Grade de cada fator nos limiares condicionais: um quarto da grade de pares,
    no mínimo 8, reduzida só quando pontos da bola × pares passaria de
    PAIR_THRESHOLD_WORK.
    """
    grid = max((pair_grid or default_pair_grid(d)) // 4, MIN_THRESHOLD_PAIR_GRID)
    while grid > 2 and ball_points * (type_count(grid, d) + 1) ** 2 > PAIR_THRESHOLD_WORK:
        grid -= 1
    if ball_points * (type_count(grid, d) + 1) ** 2 > PAIR_THRESHOLD_WORK:
        raise ResourceLimitError(
            f"Limiares condicionais com {ball_points} pontos da bola e d={d}", PAIR_THRESHOLD_WORK
        )
    return grid


def select_rate(
    eps: float,
    p_u: TypeDist,
    p_w: TypeDist,
    lam: int,
    lam_prime: int,
    e_target: float,
    d: int,
    rate_step: float = 1e-3,
    ball_steps: int = 4,
    grid: Optional[int] = None,
    refine_passes: Optional[int] = None,
    conditional: bool = False,
    pair_grid: Optional[int] = None,
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> RateSelection:
    """
    Maior taxa da grade tal que o expoente continua ≥ E_target em todos os
    pontos (α, p, q) de uma grade que cobre a bola ℓ1 de raio ε ao redor da
    estimativa. Com `conditional` usa E_c (pares (p, f(q)) e (q, p)).
    """
    if eps < 0 or lam < 0 or lam_prime < 0 or lam + lam_prime == 0:
        raise UsageError(f"select_rate exige ε ≥ 0 e ν > 0 (ε={eps}, λ={lam}, λ′={lam_prime})")
    if p_u.size != d or p_w.size != d:
        raise UsageError("Estimativas com alfabeto diferente de d")
    nu = lam + lam_prime
    alpha_hat = lam_prime / nu
    center = np.concatenate([(1.0 - alpha_hat) * p_u.probs(), alpha_hat * p_w.probs()])
    ball = epsilon_ball(center, eps, ball_steps, cap=enum_cap)
    alpha, p, q = split_pi(ball, d)
    flipped_q = q[:, (-np.arange(d)) % d]
    pbar_m = (1.0 - alpha)[:, None] * p + alpha[:, None] * flipped_q
    pdbar_m = (1.0 - alpha)[:, None] * q + alpha[:, None] * p

    if conditional:
        coarse = threshold_pair_grid(d, ball.shape[0], pair_grid)
        thresholds = np.minimum(
            pair_rate_thresholds(p, flipped_q, e_target, coarse),
            pair_rate_thresholds(q, p, e_target, coarse),
        )
    else:
        g = grid or default_grid(d)
        thresholds = np.minimum(rate_thresholds(pbar_m, e_target, g), rate_thresholds(pdbar_m, e_target, g))
    worst = int(np.argmin(thresholds))
    rate = math.floor(max(float(thresholds[worst]), 0.0) / rate_step + 1e-9) * rate_step

    def exponent_at(value: float) -> float:
        if conditional:
            return min(
                estar_pair(value, p[worst], flipped_q[worst], grid=pair_grid, refine_passes=refine_passes).value,
                estar_pair(value, q[worst], p[worst], grid=pair_grid, refine_passes=refine_passes).value,
            )
        return e_joint(value, pbar_m[worst], pdbar_m[worst], grid=grid, refine_passes=refine_passes).value

    exponent = exponent_at(rate) if rate > 0 else 0.0
    while rate > 0 and exponent < e_target - 1e-12:
        rate = round(rate - rate_step, 12)
        exponent = exponent_at(rate) if rate > 0 else 0.0
    advice = RateAdvice.PROCEED if rate > 0 else RateAdvice.ABORT
    fail_exp = failure_exponent(center, eps, nu, d)
    logger.debug(
        f"Taxa selecionada: rate={rate}, eps={eps}, ball_points={ball.shape[0]}, "
        f"worst_alpha={alpha[worst]:.4f}, advice={advice.value}"
    )
    return RateSelection(
        rate=max(rate, 0.0),
        advice=advice,
        rate_step=rate_step,
        ball_points=int(ball.shape[0]),
        ball_step=eps / ball_steps if eps > 0 else 0.0,
        worst_alpha=float(alpha[worst]),
        worst_pbar=pbar_m[worst],
        worst_pdbar=pdbar_m[worst],
        exponent_at_rate=exponent,
        failure_exponent=fail_exp,
        failure_probability_bound=_pow(d, -fail_exp) if math.isfinite(fail_exp) else 0.0,
    )


@dataclass
class ChosenRate:
    rate: float
    k: Optional[int]
    advice: RateAdvice


def chosen_rate_modified(
    gamma: float, est_x: TypeDist, est_z: TypeDist, d: int, n: Optional[int] = None
) -> ChosenRate:
    """
    R = 1 − 2 max{H(P_ξ), H(P_ζ)} − 2γ; com n informado, k é o menor inteiro
    com k/n ≥ R.
    """
    if gamma <= 0:
        raise UsageError(f"γ={gamma} precisa ser positivo")
    worst = max(entropy(est_x.probs(), d), entropy(est_z.probs(), d))
    rate = 1.0 - 2.0 * worst - 2.0 * gamma
    if rate <= 0:
        return ChosenRate(rate=rate, k=None, advice=RateAdvice.ABORT)
    k = None if n is None else int(math.ceil(rate * n - 1e-9))
    return ChosenRate(rate=rate, k=k, advice=RateAdvice.PROCEED)


@dataclass
class JointAttackBounds:
    alpha: float
    e1: float
    o_m: float
    fidelity_bound: float
    leakage_bound: float


def o_m(m: int, gamma: float, d: int) -> float:
    """o(m) = 3 log_d 2 + d + 6(d−1) log_d m + log_d[m(γ+1)]."""
    return 3.0 * math.log(2.0, d) + d + 6.0 * (d - 1) * math.log(m, d) + math.log(m * (gamma + 1.0), d)


def joint_attack_bounds(n: int, sift_size: int, m: int, gamma: float, d: int) -> JointAttackBounds:
    """
    Cotas do protocolo modificado contra ataques conjuntos:
    1 − F ≤ 4 d^d |P_n|³ |P_{(n+M)/2}|³ d^{−n E1(γ, α)} e I ≤ d^{−n E1 + o(m)},
    com α = (M − n)/(M + n).
    """
    if n < 1 or sift_size <= n or m < sift_size:
        raise UsageError(f"joint_attack_bounds exige 1 ≤ n < M ≤ m (n={n}, M={sift_size}, m={m})")
    alpha = (sift_size - n) / (sift_size + n)
    exponent = e1(gamma, alpha, d)
    half = (n + sift_size) // 2
    log_fid = (
        math.log(4.0)
        + d * math.log(d)
        + 3.0 * math.log(type_count(n, d))
        + 3.0 * math.log(type_count(half, d))
        - n * exponent * math.log(d)
    )
    om = o_m(m, gamma, d)
    return JointAttackBounds(
        alpha=alpha,
        e1=exponent,
        o_m=om,
        fidelity_bound=math.exp(min(log_fid, 700.0)),
        leakage_bound=_pow(d, -n * exponent + om),
    )
