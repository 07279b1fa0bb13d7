"""
Estado de uma sessão de distribuição de chave: transcrição dígito a
dígito, papéis dos dígitos e relatório final.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
import numpy.typing as npt

from .models import DecodeRule, ProtocolMode
from .typesys import TypeDist


class DigitRole(str, Enum):
    """
    Destino de cada dígito transmitido.
    """
    DISCARDED = "discarded"  # bases diferentes
    CODE = "code"
    ESTIMATION = "estimation"
    DIVERTED = "diverted"  # d=2 com quantidade ímpar de dígitos de código
    UNUSED = "unused"  # sobra de dígitos de código que não completa um bloco


ROLE_ORDER: Tuple[DigitRole, ...] = tuple(DigitRole)


def role_code(role: DigitRole) -> int:
    return ROLE_ORDER.index(role)


class SessionOutcome(str, Enum):
    COMPLETED = "completed"
    ABORTED = "aborted"
    DEGENERATE_ESTIMATE = "degenerate_estimate"


@dataclass
class Transcript:
    """
    Sorteios de uma sessão. `a`, `b` e `c` são as escolhas de base de Alice,
    de Bob e o sorteio de estimação (c=1); `sent`/`received` são os dígitos
    de cada lado e (xi, zeta) o ruído i.i.d. do ataque.
    """
    d: int
    a: npt.NDArray[np.int8]
    b: npt.NDArray[np.int8]
    c: npt.NDArray[np.int8]
    sent: npt.NDArray[np.int64]
    received: npt.NDArray[np.int64]
    xi: npt.NDArray[np.int64]
    zeta: npt.NDArray[np.int64]
    roles: npt.NDArray[np.int8] = field(init=False)

    def __post_init__(self) -> None:
        self.roles = np.full(self.sent.size, role_code(DigitRole.DISCARDED), dtype=np.int8)

    @property
    def m(self) -> int:
        return int(self.sent.size)

    def sifted(self) -> npt.NDArray[np.bool_]:
        return self.a == self.b

    def assign(self, indices: npt.ArrayLike, role: DigitRole) -> None:
        self.roles[np.asarray(indices, dtype=np.int64)] = role_code(role)

    def indices(self, role: DigitRole) -> npt.NDArray[np.int64]:
        return np.flatnonzero(self.roles == role_code(role))

    def count(self, role: DigitRole) -> int:
        return int(np.count_nonzero(self.roles == role_code(role)))

    def role_counts(self) -> Dict[str, int]:
        return {role.value: self.count(role) for role in DigitRole}


@dataclass
class ChannelEstimate:
    """
    P_U: tipo de (enviado − recebido) nos dígitos de estimação com a=b=0;
    P_W: tipo de (recebido − enviado) nos de a=b=1. ν = λ + λ′.
    """
    p_u: Optional[TypeDist]
    p_w: Optional[TypeDist]
    lam: int
    lam_prime: int

    @property
    def nu(self) -> int:
        return self.lam + self.lam_prime

    @property
    def degenerate(self) -> bool:
        return self.lam == 0 or self.lam_prime == 0


@dataclass
class SessionBounds:
    """Cotas teóricas anexadas a uma sessão (valores de fórmula, não medições)."""
    block_failure_exact: Optional[float] = None
    session_failure_exact: Optional[float] = None
    exponent: Optional[float] = None
    fidelity_block: Optional[float] = None
    fidelity_session: Optional[float] = None
    leakage_block: Optional[float] = None
    leakage_session: Optional[float] = None
    leakage_vanishing: Optional[bool] = None
    estimation_failure_exponent: Optional[float] = None
    e1: Optional[float] = None
    e2: Optional[float] = None
    joint_fidelity: Optional[float] = None
    joint_leakage: Optional[float] = None


@dataclass
class SessionReport:
    mode: ProtocolMode
    session: int
    outcome: SessionOutcome
    decoder: DecodeRule
    m: int
    role_counts: Dict[str, int]
    sift_size: int
    n: int = 0
    block_length: int = 0
    blocks: int = 0
    k: int = 0
    kappa: int = 0
    estimate: Optional[ChannelEstimate] = None
    rate: float = 0.0
    sigma: npt.NDArray[np.int64] = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    sigma_prime: npt.NDArray[np.int64] = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    announced: List[List[int]] = field(default_factory=list)
    block_agreement: List[bool] = field(default_factory=list)
    error_in_gamma_prime: List[bool] = field(default_factory=list)
    bounds: SessionBounds = field(default_factory=SessionBounds)
    reason: str = ""

    @property
    def aborted(self) -> bool:
        return self.outcome is not SessionOutcome.COMPLETED

    @property
    def agreed(self) -> Optional[bool]:
        if self.aborted:
            return None
        return bool(np.array_equal(self.sigma, self.sigma_prime))
