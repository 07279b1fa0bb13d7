"""
Erros da bancada CSS-QKD.

Cada exceção carrega um ErrorCode para que a CLI e os relatórios
consigam classificar a falha sem inspecionar mensagens.
"""
from enum import Enum
from typing import Optional


class ErrorCode(str, Enum):
    USAGE = "usage"
    RESOURCE_LIMIT = "resource_limit"
    NOT_SELF_ORTHOGONAL = "not_self_orthogonal"
    D2_RULE_VIOLATION = "d2_rule_violation"
    NOT_FOUND = "not_found"
    CODEBANK_MISS = "codebank_miss"
    DEGENERATE_ESTIMATE = "degenerate_estimate"
    ABORT = "abort"


class CssQkdError(Exception):
    """Erro base; `code` identifica o tipo de falha."""

    code: ErrorCode = ErrorCode.USAGE

    def __init__(self, message: str, code: Optional[ErrorCode] = None) -> None:
        super().__init__(message)
        if code is not None:
            self.code = code


class UsageError(CssQkdError, ValueError):
    """Entrada inválida (tamanhos, módulo, parâmetros fora do domínio)."""

    code = ErrorCode.USAGE


class ResourceLimitError(CssQkdError):
    """Enumeração acima do teto configurado."""

    code = ErrorCode.RESOURCE_LIMIT

    def __init__(self, message: str, cap: int) -> None:
        super().__init__(f"{message} (teto={cap})")
        self.cap = cap


class CodeConstructionError(CssQkdError):
    """Falha ao montar ou procurar um código CSS."""

    def __init__(self, message: str, code: ErrorCode, tries: Optional[int] = None) -> None:
        super().__init__(message, code)
        self.tries = tries


class CodebankMissError(CssQkdError):
    code = ErrorCode.CODEBANK_MISS
