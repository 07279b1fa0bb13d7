"""
Funções para normalizar e validar entradas textuais da CLI.
"""
import re
from typing import Dict, List

import numpy as np

from .errors import UsageError
from .typesys import Dist, as_dist

GRID_RE = re.compile(r"^\s*([-+0-9.eE]+)\s*\.\.\s*([-+0-9.eE]+)\s*:\s*([-+0-9.eE]+)\s*$")
CONFIG_LINE_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_\-]*)\s*=\s*(.*?)\s*$")


def _float(raw: str, what: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"{what}: {raw!r} não é um número")


def parse_grid(raw: str) -> np.ndarray:
    """
    Converte "lo..hi:passo" (extremos inclusos) ou "a,b,c" em um array.

    Aceita formatos como:
    - "0..1:0.01" → 101 pontos
    - "0.1,0.2"   → [0.1, 0.2]
    """
    match = GRID_RE.match(raw)
    if match is None:
        values = [_float(x, "grade") for x in raw.split(",") if x.strip()]
        if not values:
            raise UsageError(f"Grade vazia: {raw!r}")
        return np.asarray(values, dtype=np.float64)
    lo, hi, step = (_float(x, "grade") for x in match.groups())
    if step <= 0 or hi < lo:
        raise UsageError(f"Grade inválida: {raw!r}")
    count = int(round((hi - lo) / step))
    if abs(lo + count * step - hi) > 1e-9 * max(1.0, abs(hi)):
        raise UsageError(f"O passo {step} não divide o intervalo [{lo}, {hi}]")
    # linspace evita o acúmulo de erro de lo + i·passo
    return np.linspace(lo, hi, count + 1)


def parse_dist(raw: str, size: int | None = None) -> Dist:
    """"0.95,0.05" → distribuição validada (soma 1, entradas ≥ 0)."""
    values = [_float(x, "distribuição") for x in raw.split(",") if x.strip()]
    return as_dist(values, size)


def parse_bits(raw: str) -> List[int]:
    digits = re.sub(r"[\s,]", "", raw)
    if not digits.isdigit():
        raise UsageError(f"Sequência de dígitos inválida: {raw!r}")
    return [int(ch) for ch in digits]


def split_attack_spec(raw: str) -> tuple[str, str]:
    """
    Separa "nome:argumento"; o argumento pode estar vazio ("identity").
    """
    name, _, arg = raw.strip().partition(":")
    name = name.strip().lower()
    if not name:
        raise UsageError("Especificação de ataque vazia")
    return name, arg.strip()


def parse_config_lines(lines: List[str]) -> Dict[str, str]:
    """
    Arquivo plano "chave = valor", um por linha; '#' inicia comentário.
    Chaves com '-' são normalizadas para '_'.
    """
    result: Dict[str, str] = {}
    for number, line in enumerate(lines, start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        match = CONFIG_LINE_RE.match(stripped)
        if match is None:
            raise UsageError(f"Linha {number} do arquivo de configuração inválida: {line.strip()!r}")
        key, value = match.groups()
        result[key.replace("-", "_").lower()] = value
    return result
