from enum import Enum
from typing import Optional

import galois
from pydantic import BaseModel, ConfigDict, Field, model_validator


class DecodeRule(str, Enum):
    """
    Regra usada para escolher o representante de cada coclasse de C⊥.
    """
    MIN_ENTROPY = "min_entropy"
    MIN_COND_ENTROPY = "min_cond_entropy"
    MIN_HAMMING = "min_hamming"


class KeyDirection(str, Enum):
    ENCODE = "encode"
    DECODE = "decode"


class ProtocolMode(str, Enum):
    BB84 = "bb84"
    MODIFIED = "modified"


class EnsembleVariant(str, Enum):
    """
    Conjunto de códigos autoortogonais enumerado pelo oráculo.
    ALL_SELF_ORTHOGONAL: todos os C ⊆ C⊥ de dimensão κ.
    CONTAINS_ALL_ONES: apenas os que contêm 1ⁿ (caso d=2, n par).
    """
    ALL_SELF_ORTHOGONAL = "all_self_orthogonal"
    CONTAINS_ALL_ONES = "contains_all_ones"


class RateAdvice(str, Enum):
    PROCEED = "proceed"
    ABORT = "abort"


class ProtocolConfig(BaseModel):
    """
    Parâmetros de uma sessão. No modo MODIFIED, p_c não é usado e
    p_a, p_b precisam estar em (0, 1/2).
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    d: int = 2
    m: int = Field(6000, ge=1)
    p_a: float = Field(0.5, gt=0.0, lt=1.0)
    p_b: float = Field(0.5, gt=0.0, lt=1.0)
    p_c: float = Field(0.5, gt=0.0, lt=1.0)
    mode: ProtocolMode = ProtocolMode.BB84
    eps: float = Field(0.02, ge=0.0)
    gamma: float = Field(0.05, gt=0.0)
    e_target: float = Field(0.01, ge=0.0)
    seed: int = Field(0, ge=0)
    decoder: DecodeRule = DecodeRule.MIN_ENTROPY
    rate_step: float = Field(1e-3, gt=0.0, lt=1.0)
    ball_steps: int = Field(4, ge=1)
    r_margin: float = Field(0.05, gt=0.0, lt=0.5)
    codebank: Optional[str] = None

    @model_validator(mode="after")
    def _check_mode(self) -> "ProtocolConfig":
        if self.d < 2 or not galois.is_prime(self.d):
            raise ValueError(f"d={self.d} precisa ser primo")
        if self.mode is ProtocolMode.MODIFIED:
            if not (self.p_a < 0.5 and self.p_b < 0.5):
                raise ValueError("No modo modified, p_a e p_b precisam estar em (0, 1/2)")
            if self.decoder is DecodeRule.MIN_COND_ENTROPY:
                raise ValueError("min_cond_entropy só se aplica ao modo bb84")
        return self
