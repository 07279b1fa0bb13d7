"""
Esquemas de entrada e saída da CLI (pydantic v2).

Os relatórios são convertidos com `model_dump(mode="json")` e gravados com
floats em 12 algarismos significativos por storage.files.render_json.
"""
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from ..core.engine import MonteCarloSummary
from ..core.models import ProtocolConfig
from ..core.oracle import CheckResult
from ..core.session_state import SessionReport


class SimulateRun(BaseModel):
    """Configuração resolvida do subcomando simulate (arquivo + flags)."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    protocol: ProtocolConfig
    attack: str = "identity"
    trials: int = Field(1, ge=1)


class SessionRecord(BaseModel):
    session: int
    outcome: str
    decoder: str
    m: int
    role_counts: Dict[str, int]
    sift_size: int
    n: int
    block_length: int
    blocks: int
    k: int
    kappa: int
    nu: Optional[int] = None
    lam: Optional[int] = None
    lam_prime: Optional[int] = None
    p_u: Optional[List[float]] = None
    p_w: Optional[List[float]] = None
    rate: float
    sigma: List[int]
    sigma_prime: List[int]
    agreed: Optional[bool]
    announced: List[List[int]]
    error_in_gamma_prime: List[bool]
    bounds: Dict[str, Union[bool, float, None]]
    reason: str = ""

    @classmethod
    def from_report(cls, report: SessionReport) -> "SessionRecord":
        estimate = report.estimate
        return cls(
            session=report.session,
            outcome=report.outcome.value,
            decoder=report.decoder.value,
            m=report.m,
            role_counts=report.role_counts,
            sift_size=report.sift_size,
            n=report.n,
            block_length=report.block_length,
            blocks=report.blocks,
            k=report.k,
            kappa=report.kappa,
            nu=estimate.nu if estimate else None,
            lam=estimate.lam if estimate else None,
            lam_prime=estimate.lam_prime if estimate else None,
            p_u=estimate.p_u.probs().tolist() if estimate and estimate.p_u else None,
            p_w=estimate.p_w.probs().tolist() if estimate and estimate.p_w else None,
            rate=report.rate,
            sigma=[int(x) for x in report.sigma],
            sigma_prime=[int(x) for x in report.sigma_prime],
            agreed=report.agreed,
            announced=report.announced,
            error_in_gamma_prime=report.error_in_gamma_prime,
            bounds=vars(report.bounds).copy(),
            reason=report.reason,
        )


class AggregateReport(BaseModel):
    trials: int
    completed: int
    aborted: int
    degenerate: int
    disagreements: int
    disagreement_frequency: float
    disagreement_interval: List[float]
    abort_frequency: float
    mean_rate: float
    mean_session_failure_exact: Optional[float] = None
    max_session_failure_exact: Optional[float] = None
    max_fidelity_bound: Optional[float] = None
    max_leakage_bound: Optional[float] = None
    min_estimation_failure_exponent: Optional[float] = None
    outcome_counts: Dict[str, int]

    @classmethod
    def from_summary(cls, summary: MonteCarloSummary) -> "AggregateReport":
        return cls(
            trials=summary.trials,
            completed=summary.completed,
            aborted=summary.aborted,
            degenerate=summary.degenerate,
            disagreements=summary.disagreements,
            disagreement_frequency=summary.disagreement_frequency,
            disagreement_interval=list(summary.disagreement_interval),
            abort_frequency=summary.abort_frequency,
            mean_rate=summary.mean_rate,
            mean_session_failure_exact=summary.mean_session_failure_exact,
            max_session_failure_exact=summary.max_session_failure_exact,
            max_fidelity_bound=summary.max_fidelity_bound,
            max_leakage_bound=summary.max_leakage_bound,
            min_estimation_failure_exponent=summary.min_estimation_failure_exponent,
            outcome_counts=summary.outcome_counts,
        )


class SimulationArtifact(BaseModel):
    config: Dict[str, Any]
    attack: str
    records: List[SessionRecord]
    aggregate: AggregateReport

    @classmethod
    def build(cls, run: SimulateRun, summary: MonteCarloSummary) -> "SimulationArtifact":
        echo = run.protocol.model_dump(mode="json")
        echo.update(attack=run.attack, trials=run.trials)
        return cls(
            config=echo,
            attack=summary.attack_label,
            records=[SessionRecord.from_report(r) for r in summary.reports],
            aggregate=AggregateReport.from_summary(summary),
        )


class CheckRecord(BaseModel):
    name: str
    passed: bool
    detail: str


class VerifyReport(BaseModel):
    quick: bool
    seed: int
    passed: bool
    checks: List[CheckRecord]

    @classmethod
    def from_results(cls, results: List[CheckResult], quick: bool, seed: int) -> "VerifyReport":
        checks = [CheckRecord(name=r.name, passed=r.passed, detail=r.detail) for r in results]
        return cls(quick=quick, seed=seed, passed=all(c.passed for c in checks), checks=checks)
