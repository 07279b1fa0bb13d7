import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import numpy.typing as npt

from ..config import AppConfig
from ..domain.channels import AttackModel, preset_attack
from ..infra.random_streams import RandomStreams, StreamLabel
from ..storage.codebank import CodeBank, CodeRecord
from .csscode import CssCode, build_css, transmit_key
from .errors import CodebankMissError, UsageError
from .exponents import (
    chosen_rate_modified,
    e2,
    e_cond,
    e_joint,
    fidelity_bound,
    joint_attack_bounds,
    leakage_bound,
    select_rate,
    sifting_ratio,
)
from .gfvec import LinearCode
from .models import DecodeRule, ProtocolConfig, ProtocolMode, RateAdvice
from .oracle import exact_marginal_failure, wilson_interval
from .session_state import (
    ChannelEstimate,
    DigitRole,
    SessionBounds,
    SessionOutcome,
    SessionReport,
    Transcript,
)
from .typesys import flip, fourier_relabel, marginals, mixture_marginals, type_of

logger = logging.getLogger(__name__)

# acima disso o cálculo exato por bloco (d^n palavras) é pulado
EXACT_BLOCK_WORDS = 1 << 20


def estimate_channel(transcript: Transcript) -> ChannelEstimate:
    """
    P_U = tipo de (enviado − recebido) nos dígitos de estimação com a=b=0;
    P_W = tipo de (recebido − enviado) nos de a=b=1.
    """
    d = transcript.d
    est = np.zeros(transcript.m, dtype=bool)
    est[transcript.indices(DigitRole.ESTIMATION)] = True
    z_digits = est & (transcript.a == 0) & (transcript.b == 0)
    x_digits = est & (transcript.a == 1) & (transcript.b == 1)
    lam = int(np.count_nonzero(z_digits))
    lam_prime = int(np.count_nonzero(x_digits))
    p_u = type_of((transcript.sent[z_digits] - transcript.received[z_digits]) % d, d) if lam else None
    p_w = type_of((transcript.received[x_digits] - transcript.sent[x_digits]) % d, d) if lam_prime else None
    return ChannelEstimate(p_u=p_u, p_w=p_w, lam=lam, lam_prime=lam_prime)


def simulate_transmission(
    cfg: ProtocolConfig, attack: AttackModel, streams: RandomStreams, p_c: Optional[float]
) -> Transcript:
    """
    Sorteia bases, dígitos e ruído. Na base Z (a=b=0) Bob recebe enviado − ξ;
    na base X (a=b=1) recebe enviado + ζ; com bases diferentes recebe um
    dígito uniforme, que nunca entra em estatística alguma.
    """
    d, m = cfg.d, cfg.m
    if attack.d != d:
        raise UsageError(f"Ataque com d={attack.d}, sessão com d={d}")
    bases = streams.generator(StreamLabel.BASES)
    a = (bases.random(m) < cfg.p_a).astype(np.int8)
    b = (bases.random(m) < cfg.p_b).astype(np.int8)
    c = (bases.random(m) < p_c).astype(np.int8) if p_c is not None else np.zeros(m, dtype=np.int8)
    sent = streams.generator(StreamLabel.PAYLOAD).integers(0, d, size=m)
    eve = streams.generator(StreamLabel.EVE_NOISE)
    pairs = eve.choice(d * d, size=m, p=attack.dist.reshape(-1))
    xi, zeta = pairs // d, pairs % d
    received = eve.integers(0, d, size=m)
    z_basis = (a == 0) & (b == 0)
    x_basis = (a == 1) & (b == 1)
    received[z_basis] = (sent[z_basis] - xi[z_basis]) % d
    received[x_basis] = (sent[x_basis] + zeta[x_basis]) % d
    return Transcript(d=d, a=a, b=b, c=c, sent=sent, received=received, xi=xi, zeta=zeta)


@dataclass
class MonteCarloSummary:
    config: ProtocolConfig
    attack_label: str
    trials: int
    reports: List[SessionReport]
    completed: int
    aborted: int
    degenerate: int
    disagreements: int
    disagreement_frequency: float
    disagreement_interval: Tuple[float, float]
    abort_frequency: float
    mean_rate: float
    mean_session_failure_exact: Optional[float]
    max_session_failure_exact: Optional[float]
    max_fidelity_bound: Optional[float]
    max_leakage_bound: Optional[float]
    min_estimation_failure_exponent: Optional[float]
    outcome_counts: Dict[str, int] = field(default_factory=dict)


class ProtocolEngine:
    """
    Núcleo da simulação de sessões.

    - Sorteia a transcrição (bases, dígitos, ruído do ataque)
    - Separa dígitos descartados, de código e de estimação
    - Estima o canal, escolhe taxa e código do banco
    - Transmite a chave bloco a bloco e anexa as cotas teóricas
    """

    def __init__(self, config: AppConfig, codebank: CodeBank) -> None:
        self._config = config
        self._bank = codebank
        self._exact_cache: Dict[Tuple, Optional[float]] = {}
        self._exponent_cache: Dict[Tuple, float] = {}
        logger.info(
            f"ProtocolEngine inicializado: codebank_records={len(codebank)}, "
            f"enum_cap={config.enum_cap}, block_multiple={config.block_multiple}"
        )

    # Blocos e códigos

    def _block_length(self, d: int, available: int, even: bool = False) -> Optional[int]:
        """Maior comprimento do banco (múltiplo da granularidade) que cabe em `available`."""
        lengths = [
            n for n in self._bank.lengths(d)
            if n % self._config.block_multiple == 0 and (not even or n % 2 == 0)
        ]
        if not lengths:
            raise CodebankMissError(f"Banco de códigos sem comprimentos utilizáveis para d={d}")
        fitting = [n for n in lengths if n <= available]
        return max(fitting) if fitting else None

    def _css(self, record: CodeRecord, rule: DecodeRule) -> CssCode:
        return self._bank.css(record, rule=rule, enum_cap=self._config.enum_cap)

    def _exact_block_failure(self, css: CssCode, position_dists: npt.NDArray[np.float64]) -> Optional[float]:
        if css.d ** css.n > min(EXACT_BLOCK_WORDS, self._config.enum_cap):
            return None
        key = (css.d, css.n, css.k, css.rule, position_dists.round(15).tobytes())
        if key not in self._exact_cache:
            self._exact_cache[key] = exact_marginal_failure(css, position_dists)
        return self._exact_cache[key]

    def _code_exponent(self, rate: float, first: npt.NDArray[np.float64], second: npt.NDArray[np.float64], conditional: bool) -> float:
        """
        E(R, P̄, P̿) para as marginais informadas ou, com `conditional`,
        E_c(R, P0, P1) para as conjuntas das duas metades.
        """
        key = (round(rate, 12), conditional, first.round(15).tobytes(), second.round(15).tobytes())
        if key not in self._exponent_cache:
            if conditional:
                value = e_cond(
                    rate,
                    first,
                    second,
                    grid=self._config.pair_grid_for(first.shape[0]),
                    refine_passes=self._config.refine_passes,
                ).value
            else:
                value = e_joint(
                    rate, first, second, grid=self._config.grid_for(first.size), refine_passes=self._config.refine_passes
                ).value
            self._exponent_cache[key] = value
        return self._exponent_cache[key]

    def _attach_code_bounds(
        self, report: SessionReport, css: CssCode, position_dists: npt.NDArray[np.float64], exponent: float
    ) -> None:
        bounds = report.bounds
        blocks = report.blocks
        block_exact = self._exact_block_failure(css, position_dists)
        if block_exact is not None:
            bounds.block_failure_exact = block_exact
            bounds.session_failure_exact = 1.0 - (1.0 - block_exact) ** blocks
        rate = css.k / css.n
        bounds.exponent = exponent
        fid = min(1.0, fidelity_bound(css.n, exponent, css.d))
        bounds.fidelity_block = fid
        bounds.fidelity_session = min(1.0, blocks * fid)
        leak = leakage_bound(css.n, exponent, rate, css.d)
        bounds.leakage_block = leak.reported
        bounds.leakage_session = blocks * leak.reported
        bounds.leakage_vanishing = leak.vanishing

    def _transmit_blocks(
        self, report: SessionReport, transcript: Transcript, blocks: List[npt.NDArray[np.int64]], codes: List[CssCode]
    ) -> None:
        sigmas, primes = [], []
        for positions, css in zip(blocks, codes):
            result = transmit_key(css, transcript.sent[positions], transcript.received[positions])
            sigmas.append(result.sigma)
            primes.append(result.sigma_prime)
            report.announced.append([int(x) for x in result.announced])
            report.block_agreement.append(result.agreed)
            report.error_in_gamma_prime.append(result.error_in_gamma_prime)
        report.sigma = np.concatenate(sigmas) if sigmas else np.zeros(0, dtype=np.int64)
        report.sigma_prime = np.concatenate(primes) if primes else np.zeros(0, dtype=np.int64)

    def _divert_if_odd(self, transcript: Transcript, candidates: npt.NDArray[np.int64], rng: np.random.Generator) -> npt.NDArray[np.int64]:
        if transcript.d == 2 and candidates.size % 2 == 1:
            victim = int(rng.integers(0, candidates.size))
            transcript.assign([candidates[victim]], DigitRole.DIVERTED)
            return np.delete(candidates, victim)
        return candidates

    def _finish(self, report: SessionReport, transcript: Transcript) -> SessionReport:
        report.role_counts = transcript.role_counts()
        if sum(report.role_counts.values()) != transcript.m:
            raise RuntimeError(f"Contabilidade de dígitos inconsistente: {report.role_counts} != m={transcript.m}")
        log = logger.info if report.outcome is SessionOutcome.COMPLETED else logger.warning
        log(
            f"Sessão concluída: mode={report.mode.value}, session={report.session}, outcome={report.outcome.value}, "
            f"n={report.n}, k={report.k}, rate={report.rate:.4f}, agreed={report.agreed}, reason={report.reason}"
        )
        return report

    def _new_report(self, cfg: ProtocolConfig, session: int, transcript: Transcript) -> SessionReport:
        return SessionReport(
            mode=cfg.mode,
            session=session,
            outcome=SessionOutcome.COMPLETED,
            decoder=cfg.decoder,
            m=cfg.m,
            role_counts={},
            sift_size=int(np.count_nonzero(transcript.sifted())),
        )

    # Protocolos

    def run_bb84(self, cfg: ProtocolConfig, attack: AttackModel, session: int = 0) -> SessionReport:
        """
        BB84 com estimação por amostragem (c=1), escolha de taxa na bola ε e
        códigos em soma direta de blocos do banco.
        """
        if cfg.mode is not ProtocolMode.BB84:
            raise UsageError("run_bb84 exige mode=bb84")
        streams = RandomStreams(cfg.seed, session)
        transcript = simulate_transmission(cfg, attack, streams, cfg.p_c)
        report = self._new_report(cfg, session, transcript)
        d = cfg.d
        sampling = streams.generator(StreamLabel.SAMPLING)
        sifted = transcript.sifted()
        transcript.assign(np.flatnonzero(sifted & (transcript.c == 1)), DigitRole.ESTIMATION)
        candidates = self._divert_if_odd(transcript, np.flatnonzero(sifted & (transcript.c == 0)), sampling)

        conditional = cfg.decoder is DecodeRule.MIN_COND_ENTROPY
        if conditional:
            z_code = candidates[transcript.a[candidates] == 0]
            x_code = candidates[transcript.a[candidates] == 1]
            n_b = self._block_length(d, 2 * min(z_code.size, x_code.size), even=True)
            half = (n_b or 0) // 2
            blocks_count = min(z_code.size, x_code.size) // half if half else 0
            blocks = [
                np.concatenate([z_code[i * half:(i + 1) * half], x_code[i * half:(i + 1) * half]])
                for i in range(blocks_count)
            ]
        else:
            n_b = self._block_length(d, candidates.size)
            blocks_count = candidates.size // n_b if n_b else 0
            blocks = [candidates[i * n_b:(i + 1) * n_b] for i in range(blocks_count)]
        used = np.concatenate(blocks) if blocks else np.zeros(0, dtype=np.int64)
        transcript.assign(np.setdiff1d(candidates, used), DigitRole.ESTIMATION)
        transcript.assign(used, DigitRole.CODE)
        report.block_length = n_b or 0
        report.blocks = blocks_count

        estimate = estimate_channel(transcript)
        report.estimate = estimate
        if estimate.degenerate:
            report.outcome = SessionOutcome.DEGENERATE_ESTIMATE
            report.reason = f"estimação degenerada (lambda={estimate.lam}, lambda_prime={estimate.lam_prime})"
            return self._finish(report, transcript)
        if blocks_count == 0:
            report.outcome = SessionOutcome.ABORTED
            report.reason = f"dígitos de código insuficientes para um bloco ({candidates.size})"
            return self._finish(report, transcript)

        selection = select_rate(
            cfg.eps,
            estimate.p_u,
            estimate.p_w,
            estimate.lam,
            estimate.lam_prime,
            cfg.e_target,
            d,
            rate_step=cfg.rate_step,
            ball_steps=cfg.ball_steps,
            grid=self._config.grid_for(d),
            refine_passes=self._config.refine_passes,
            conditional=conditional,
            pair_grid=self._config.pair_grid_for(d),
            enum_cap=self._config.enum_cap,
        )
        report.bounds.estimation_failure_exponent = selection.failure_exponent
        report.rate = selection.rate
        k_b = int(math.floor(selection.rate * n_b + 1e-9))
        if (n_b - k_b) % 2:
            k_b -= 1
        if selection.advice is RateAdvice.ABORT or k_b < 1:
            report.outcome = SessionOutcome.ABORTED
            report.reason = f"taxa selecionada {selection.rate:.4f} não comporta chave (k_b={k_b})"
            return self._finish(report, transcript)

        record = self._bank.best_at_most(d, n_b, k_b)
        css = self._css(record, cfg.decoder)
        report.n = blocks_count * n_b
        report.k = blocks_count * record.k
        report.kappa = record.kappa
        self._transmit_blocks(report, transcript, blocks, [css] * blocks_count)

        # erro de código e = enviado − recebido: ξ nos dígitos Z, −ζ nos dígitos X
        pbar, pdbar = marginals(attack.dist)
        code_rate = record.k / n_b
        if conditional:
            half_len = n_b // 2
            position_dists = np.vstack([np.tile(pbar, (half_len, 1)), np.tile(flip(pdbar), (half_len, 1))])
            exponent = self._code_exponent(code_rate, attack.dist, fourier_relabel(attack.dist), conditional=True)
        else:
            pbar_m, pdbar_m = mixture_marginals(pbar, pdbar, sifting_ratio(cfg.p_a, cfg.p_b))
            position_dists = np.tile(pbar_m, (n_b, 1))
            exponent = self._code_exponent(code_rate, pbar_m, pdbar_m, conditional=False)
        self._attach_code_bounds(report, css, position_dists, exponent)
        return self._finish(report, transcript)

    def run_modified_bb84(self, cfg: ProtocolConfig, attack: AttackModel, session: int = 0) -> SessionReport:
        """
        Protocolo modificado: todos os dígitos com a=b=1 estimam o erro de
        fase, um subconjunto aleatório de mesmo tamanho dos dígitos a=b=0
        estima o erro de bit e o restante vira código sob uma permutação π.
        """
        if cfg.mode is not ProtocolMode.MODIFIED:
            raise UsageError("run_modified_bb84 exige mode=modified")
        streams = RandomStreams(cfg.seed, session)
        transcript = simulate_transmission(cfg, attack, streams, None)
        report = self._new_report(cfg, session, transcript)
        d = cfg.d
        sampling = streams.generator(StreamLabel.SAMPLING)
        sifted = transcript.sifted()
        t1 = np.flatnonzero(sifted & (transcript.a == 1))
        t0 = np.flatnonzero(sifted & (transcript.a == 0))
        sift_size = t0.size + t1.size
        n = sift_size - 2 * t1.size
        if n <= 0 or n == sift_size:
            transcript.assign(np.concatenate([t0, t1]), DigitRole.UNUSED)
            report.outcome = SessionOutcome.ABORTED
            report.reason = f"partição inviável (M_s={sift_size}, |T1|={t1.size}, n={n})"
            return self._finish(report, transcript)

        chosen = sampling.choice(t0.size, size=t1.size, replace=False)
        mask = np.zeros(t0.size, dtype=bool)
        mask[chosen] = True
        transcript.assign(t1, DigitRole.ESTIMATION)
        transcript.assign(t0[mask], DigitRole.ESTIMATION)
        candidates = self._divert_if_odd(transcript, t0[~mask], sampling)

        n_b = self._block_length(d, candidates.size)
        blocks_count = candidates.size // n_b if n_b else 0
        blocks = [candidates[i * n_b:(i + 1) * n_b] for i in range(blocks_count)]
        used = np.concatenate(blocks) if blocks else np.zeros(0, dtype=np.int64)
        transcript.assign(np.setdiff1d(candidates, used), DigitRole.UNUSED)
        transcript.assign(used, DigitRole.CODE)
        report.block_length = n_b or 0
        report.blocks = blocks_count

        estimate = estimate_channel(transcript)
        report.estimate = estimate
        chosen_rate = chosen_rate_modified(cfg.gamma, estimate.p_u, estimate.p_w, d)
        report.rate = max(chosen_rate.rate, 0.0)

        r = sifting_ratio(cfg.p_a, cfg.p_b)
        r0, r1 = max(r - cfg.r_margin, 1e-6), min(r + cfg.r_margin, 1.0 - 1e-6)
        joint = joint_attack_bounds(n, sift_size, cfg.m, cfg.gamma, d)
        report.bounds.e1 = joint.e1
        report.bounds.e2 = e2(cfg.gamma, r0, r1, d)
        report.bounds.joint_fidelity = joint.fidelity_bound
        report.bounds.joint_leakage = joint.leakage_bound

        if chosen_rate.advice is RateAdvice.ABORT or blocks_count == 0:
            report.outcome = SessionOutcome.ABORTED
            report.reason = (
                f"taxa {chosen_rate.rate:.4f} não positiva" if chosen_rate.advice is RateAdvice.ABORT
                else f"dígitos de código insuficientes para um bloco ({candidates.size})"
            )
            return self._finish(report, transcript)

        k_b = int(math.ceil(chosen_rate.rate * n_b - 1e-9))
        if (n_b - k_b) % 2:
            k_b += 1
        record = self._bank.smallest_at_least(d, n_b, k_b)
        css = self._css(record, cfg.decoder)
        permutations = streams.generator(StreamLabel.PERMUTATION)
        codes = [css.permuted(permutations.permutation(n_b)) for _ in range(blocks_count)]
        report.n = blocks_count * n_b
        report.k = blocks_count * record.k
        report.kappa = record.kappa
        self._transmit_blocks(report, transcript, blocks, codes)

        pbar, pdbar = marginals(attack.dist)
        exponent = self._code_exponent(record.k / n_b, pbar, pdbar, conditional=False)
        self._attach_code_bounds(report, css, np.tile(pbar, (n_b, 1)), exponent)
        return self._finish(report, transcript)

    def run(self, cfg: ProtocolConfig, attack: AttackModel, session: int = 0) -> SessionReport:
        if cfg.mode is ProtocolMode.MODIFIED:
            return self.run_modified_bb84(cfg, attack, session)
        return self.run_bb84(cfg, attack, session)

    def monte_carlo(self, cfg: ProtocolConfig, attack: AttackModel, trials: int) -> MonteCarloSummary:
        """
        Executa `trials` sessões independentes (sessão i usa os fluxos
        derivados de (seed, i)) e agrega em ordem fixa.
        """
        if trials < 1:
            raise UsageError(f"trials={trials} precisa ser ≥ 1")
        logger.info(
            f"Monte Carlo iniciado: mode={cfg.mode.value}, d={cfg.d}, m={cfg.m}, attack={attack.label}, "
            f"trials={trials}, seed={cfg.seed}"
        )
        reports = [self.run(cfg, attack, session) for session in range(trials)]
        completed = [r for r in reports if r.outcome is SessionOutcome.COMPLETED]
        disagreements = sum(1 for r in completed if not r.agreed)
        counts = {outcome.value: 0 for outcome in SessionOutcome}
        for r in reports:
            counts[r.outcome.value] += 1

        def collect(values: List[Optional[float]]) -> List[float]:
            return [v for v in values if v is not None]

        exact = collect([r.bounds.session_failure_exact for r in completed])
        fidelity = collect([r.bounds.fidelity_session for r in completed])
        leakage = collect([r.bounds.leakage_session for r in completed])
        failure_exp = collect([r.bounds.estimation_failure_exponent for r in reports])
        summary = MonteCarloSummary(
            config=cfg,
            attack_label=attack.label,
            trials=trials,
            reports=reports,
            completed=len(completed),
            aborted=counts[SessionOutcome.ABORTED.value],
            degenerate=counts[SessionOutcome.DEGENERATE_ESTIMATE.value],
            disagreements=disagreements,
            disagreement_frequency=disagreements / len(completed) if completed else 0.0,
            disagreement_interval=wilson_interval(disagreements, len(completed)),
            abort_frequency=(trials - len(completed)) / trials,
            mean_rate=float(np.mean([r.rate for r in completed])) if completed else 0.0,
            mean_session_failure_exact=float(np.mean(exact)) if exact else None,
            max_session_failure_exact=max(exact) if exact else None,
            max_fidelity_bound=max(fidelity) if fidelity else None,
            max_leakage_bound=max(leakage) if leakage else None,
            min_estimation_failure_exponent=min(failure_exp) if failure_exp else None,
            outcome_counts=counts,
        )
        logger.info(
            f"Monte Carlo concluído: completed={summary.completed}, aborted={summary.aborted}, "
            f"degenerate={summary.degenerate}, disagreements={disagreements}, mean_rate={summary.mean_rate:.4f}"
        )
        return summary


# Verificação ponta a ponta

# n=8, 1ⁿ ∈ C: pesos 8, 4, 4 e interseções pares, logo C ⊆ C⊥ para cada prefixo
CHECK_GENERATORS = ("11111111", "11110000", "11001100")


def build_check_bank() -> CodeBank:
    """Banco em memória d=2, n=8, com κ = 1, 2, 3 (k = 6, 4, 2)."""
    bank = CodeBank()
    for kappa in range(1, len(CHECK_GENERATORS) + 1):
        code = LinearCode.from_rows(list(CHECK_GENERATORS[:kappa]), 2)
        bank.add(CodeRecord.from_css(build_css(code)))
    return bank


@dataclass
class ProtocolCheck:
    noiseless_sessions: int
    noiseless_disagreements: int
    noisy: MonteCarloSummary
    noisy_bound: Optional[float]
    modified_completed: int
    modified_disagreements: int
    modified_bad_aborts: int

    @property
    def passed(self) -> bool:
        noisy_ok = (
            self.noisy.completed > 0
            and self.noisy_bound is not None
            and self.noisy.disagreement_interval[0] <= self.noisy_bound
        )
        return (
            self.noiseless_disagreements == 0
            and noisy_ok
            and self.modified_completed > 0
            and self.modified_disagreements == 0
            and self.modified_bad_aborts == 0
        )

    def detail(self) -> str:
        low, high = self.noisy.disagreement_interval
        return (
            f"noiseless={self.noiseless_sessions - self.noiseless_disagreements}/{self.noiseless_sessions}, "
            f"dephasing_freq={self.noisy.disagreement_frequency:.4g} [{low:.4g}, {high:.4g}] "
            f"bound={self.noisy_bound}, modified_completed={self.modified_completed}, "
            f"modified_disagreements={self.modified_disagreements}, bad_aborts={self.modified_bad_aborts}"
        )


def protocol_agreement_check(config: AppConfig, quick: bool = False, seed: int = 2024) -> ProtocolCheck:
    """
    Sessões completas contra canais conhecidos:

    - BB84 sem ruído: toda sessão concluída termina com chaves iguais
    - BB84 com dephasing 0.03 e m=6000: limite inferior de Wilson da
      frequência de discordância ≤ cota anexada (falha exata por sessão,
      ou a cota de fidelidade quando o exato não foi calculado)
    - BB84 modificado sem ruído: aborta quando não há bloco (n = 0) e,
      quando conclui, as chaves coincidem
    """
    engine = ProtocolEngine(config, build_check_bank())
    identity = preset_attack("identity", 2)

    noiseless = engine.monte_carlo(ProtocolConfig(m=400, seed=seed), identity, 20 if quick else 200)
    dephasing = preset_attack("dephasing", 2, 0.03)
    noisy = engine.monte_carlo(ProtocolConfig(m=6000, seed=seed), dephasing, 3 if quick else 30)
    bound = noisy.max_session_failure_exact
    if bound is None:
        bound = noisy.max_fidelity_bound

    modified = []
    for m, trials in ((2000, 4 if quick else 20), (20, 4 if quick else 20)):
        cfg = ProtocolConfig(mode=ProtocolMode.MODIFIED, m=m, p_a=0.25, p_b=0.25, gamma=0.2, seed=seed)
        modified.extend(engine.monte_carlo(cfg, identity, trials).reports)
    completed = [r for r in modified if r.outcome is SessionOutcome.COMPLETED]
    bad_aborts = sum(1 for r in modified if r.n == 0 and r.outcome is SessionOutcome.COMPLETED)

    return ProtocolCheck(
        noiseless_sessions=noiseless.trials,
        # sessão abortada também conta como falha de concordância
        noiseless_disagreements=noiseless.disagreements + noiseless.trials - noiseless.completed,
        noisy=noisy,
        noisy_bound=bound,
        modified_completed=len(completed),
        modified_disagreements=sum(1 for r in completed if not r.agreed),
        modified_bad_aborts=bad_aborts,
    )
