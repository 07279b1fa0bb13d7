from __future__ import annotations

import numpy as np
import pytest

from app.core.csscode import build_css
from app.core.engine import (
    ProtocolEngine,
    build_check_bank,
    estimate_channel,
    protocol_agreement_check,
    simulate_transmission,
)
from app.core.gfvec import LinearCode
from app.core.errors import CodebankMissError, UsageError
from app.core.models import DecodeRule, ProtocolConfig, ProtocolMode
from app.core.session_state import DigitRole, SessionOutcome
from app.domain.channels import AttackModel, preset_attack, resolve_attack
from app.infra.random_streams import RandomStreams
from app.storage.codebank import CodeBank, CodeRecord


def test_transmission_sign_conventions() -> None:
    dist = np.zeros((3, 3))
    dist[1, 2] = 1.0
    cfg = ProtocolConfig(d=3, m=300, seed=5)
    transcript = simulate_transmission(cfg, AttackModel.from_dist(dist, "fixo"), RandomStreams(5, 0), cfg.p_c)
    z = (transcript.a == 0) & (transcript.b == 0)
    x = (transcript.a == 1) & (transcript.b == 1)
    assert np.all((transcript.sent[z] - transcript.received[z]) % 3 == 1)
    assert np.all((transcript.received[x] - transcript.sent[x]) % 3 == 2)

    transcript.assign(np.flatnonzero(transcript.sifted()), DigitRole.ESTIMATION)
    estimate = estimate_channel(transcript)
    assert estimate.p_u.counts == (0, estimate.lam, 0)
    assert estimate.p_w.counts == (0, 0, estimate.lam_prime)


def test_transmission_rejects_alphabet_mismatch() -> None:
    cfg = ProtocolConfig(d=3, m=10)
    with pytest.raises(UsageError):
        simulate_transmission(cfg, preset_attack("identity", 2), RandomStreams(0, 0), cfg.p_c)


def test_noiseless_bb84_agrees(engine: ProtocolEngine) -> None:
    cfg = ProtocolConfig(m=400, eps=0.0, seed=7)
    report = engine.run_bb84(cfg, preset_attack("identity", 2))
    assert report.outcome is SessionOutcome.COMPLETED
    assert report.agreed
    assert report.k == report.blocks * 6
    assert report.role_counts[DigitRole.CODE.value] == report.n
    assert sum(report.role_counts.values()) == cfg.m
    # fração peneirada p_a p_b + (1−p_a)(1−p_b) = 1/2, dentro de 3σ
    assert abs(report.sift_size - 200) <= 30
    assert report.estimate.p_u.counts == (report.estimate.lam, 0)
    assert report.bounds.session_failure_exact == pytest.approx(0.0, abs=1e-12)
    assert 0.0 <= report.bounds.fidelity_session <= 1.0


def test_bit_flip_estimates(engine: ProtocolEngine) -> None:
    cfg = ProtocolConfig(m=400, eps=0.0, seed=3)
    report = engine.run_bb84(cfg, resolve_attack("flip:1.0", 2))
    assert report.estimate.p_u.counts == (0, report.estimate.lam)
    assert report.estimate.p_w.counts == (report.estimate.lam_prime, 0)
    assert sum(report.role_counts.values()) == cfg.m


def test_runs_are_deterministic(engine: ProtocolEngine) -> None:
    cfg = ProtocolConfig(m=400, eps=0.0, seed=11)
    attack = resolve_attack("depolarizing:0.02", 2)
    first = engine.run_bb84(cfg, attack, session=2)
    second = engine.run_bb84(cfg, attack, session=2)
    assert first.outcome is second.outcome
    assert first.role_counts == second.role_counts
    assert np.array_equal(first.sigma, second.sigma)
    assert first.announced == second.announced


def test_single_trial_monte_carlo_matches_run(engine: ProtocolEngine) -> None:
    cfg = ProtocolConfig(m=400, eps=0.0, seed=21)
    attack = preset_attack("identity", 2)
    summary = engine.monte_carlo(cfg, attack, trials=1)
    direct = engine.run(cfg, attack, session=0)
    (report,) = summary.reports
    assert report.outcome is direct.outcome
    assert np.array_equal(report.sigma, direct.sigma)
    assert summary.completed == 1
    assert summary.disagreements == 0
    assert summary.disagreement_interval[0] == 0.0
    with pytest.raises(UsageError):
        engine.monte_carlo(cfg, attack, trials=0)


def test_empty_codebank(app_config) -> None:
    engine = ProtocolEngine(app_config, CodeBank())
    with pytest.raises(CodebankMissError):
        engine.run_bb84(ProtocolConfig(m=200, seed=1), preset_attack("identity", 2))


def test_strong_noise_aborts(engine: ProtocolEngine) -> None:
    cfg = ProtocolConfig(m=1000, seed=4)
    summary = engine.monte_carlo(cfg, resolve_attack("symmetric:0.25", 2), trials=3)
    assert summary.abort_frequency == 1.0
    assert summary.completed == 0
    for report in summary.reports:
        assert report.agreed is None
        assert sum(report.role_counts.values()) == cfg.m


def test_conditional_decoder_run(engine: ProtocolEngine) -> None:
    cfg = ProtocolConfig(m=800, eps=0.0, seed=9, decoder=DecodeRule.MIN_COND_ENTROPY)
    report = engine.run_bb84(cfg, preset_attack("identity", 2))
    assert report.outcome is SessionOutcome.COMPLETED
    assert report.agreed
    assert report.block_length % 2 == 0
    assert report.role_counts[DigitRole.CODE.value] == report.n


def test_modified_noiseless_agrees(engine: ProtocolEngine) -> None:
    cfg = ProtocolConfig(mode=ProtocolMode.MODIFIED, m=2000, p_a=0.25, p_b=0.25, gamma=0.2, seed=13)
    report = engine.run_modified_bb84(cfg, preset_attack("identity", 2))
    assert report.outcome is SessionOutcome.COMPLETED
    assert report.agreed
    assert report.rate == pytest.approx(0.6)
    assert report.k == report.blocks * 6
    assert report.estimate.lam == report.estimate.lam_prime
    assert report.bounds.e1 is not None and report.bounds.e2 is not None
    assert sum(report.role_counts.values()) == cfg.m


def test_modified_small_session_aborts(engine: ProtocolEngine) -> None:
    cfg = ProtocolConfig(mode=ProtocolMode.MODIFIED, m=20, p_a=0.49, p_b=0.49, seed=2)
    summary = engine.monte_carlo(cfg, preset_attack("identity", 2), trials=5)
    assert summary.abort_frequency > 0
    for report in summary.reports:
        assert sum(report.role_counts.values()) == cfg.m


def test_mode_mismatch(engine: ProtocolEngine) -> None:
    with pytest.raises(UsageError):
        engine.run_modified_bb84(ProtocolConfig(m=100), preset_attack("identity", 2))


def test_bb84_d3_with_estimation_slack(engine: ProtocolEngine) -> None:
    attack = preset_attack("identity", 3)
    tight = engine.run_bb84(ProtocolConfig(d=3, m=800, eps=0.0, seed=5), attack)
    report = engine.run_bb84(ProtocolConfig(d=3, m=800, eps=0.02, seed=5), attack)
    assert report.outcome is SessionOutcome.COMPLETED
    assert report.agreed
    assert report.block_length == 4
    assert report.k == report.blocks * 2
    assert 0.0 < report.rate <= tight.rate
    assert report.bounds.estimation_failure_exponent > 0
    assert sum(report.role_counts.values()) == 800


def test_bb84_d5_with_estimation_slack(app_config) -> None:
    # 1·1 + 2·2 = 5 ≡ 0 (mod 5)
    bank = CodeBank([CodeRecord.from_css(build_css(LinearCode.from_rows(["1200"], 5)))])
    engine = ProtocolEngine(app_config, bank)
    report = engine.run_bb84(ProtocolConfig(d=5, m=800, eps=0.02, seed=3), preset_attack("identity", 5))
    assert report.outcome is SessionOutcome.COMPLETED
    assert report.agreed
    assert report.k == report.blocks * 2
    assert report.bounds.session_failure_exact == pytest.approx(0.0, abs=1e-12)


def test_check_bank_covers_every_kappa() -> None:
    bank = build_check_bank()
    assert bank.lengths(2) == [8]
    assert sorted(record.k for record in bank.records()) == [2, 4, 6]


@pytest.mark.slow
def test_end_to_end_protocol_agreement(app_config) -> None:
    check = protocol_agreement_check(app_config, quick=False, seed=2024)
    assert check.noiseless_sessions == 200
    assert check.noiseless_disagreements == 0
    assert check.noisy.trials == 30
    assert check.noisy.completed > 0
    assert check.noisy.disagreement_interval[0] <= check.noisy_bound
    assert check.modified_completed > 0
    assert check.modified_disagreements == 0
    assert check.modified_bad_aborts == 0
    assert check.passed, check.detail()
