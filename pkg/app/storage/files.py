"""
Leitura de canais/distribuições em arquivo e escrita de artefatos CSV/JSON.
"""
import csv
import io
import json
import logging
import math
import os
from typing import Any, Iterable, List, Sequence

import numpy as np

from ..core.errors import UsageError
from ..core.qudit import KrausChannel
from ..core.typesys import JointDist, as_joint

logger = logging.getLogger(__name__)

FLOAT_FORMAT = ".12g"


def _read_lines(path: str) -> List[str]:
    if not os.path.exists(path):
        raise UsageError(f"Arquivo não encontrado: {path}")
    with open(path, encoding="utf-8") as fh:
        return [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]


def load_dist_file(path: str, d: int | None = None) -> JointDist:
    """
    Distribuição P_A: d linhas com d valores (linha s, coluna t), separados
    por espaço ou vírgula; também aceita uma única linha com d² valores.
    """
    values = []
    for line in _read_lines(path):
        values.extend(float(x) for x in line.replace(",", " ").split())
    dist = as_joint(values, d)
    logger.debug(f"Distribuição carregada: path={path}, d={dist.shape[0]}")
    return dist


def load_kraus_file(path: str) -> KrausChannel:
    """
    Primeira linha "d r"; em seguida r blocos de d linhas. Cada linha traz
    d pares "re im" (2d números) ou d complexos no formato do Python
    (ex.: 0.5+0.1j).
    """
    lines = _read_lines(path)
    if not lines:
        raise UsageError(f"Arquivo de Kraus vazio: {path}")
    try:
        d, r = (int(x) for x in lines[0].split())
        entries = []
        for ln in lines[1:]:
            tokens = ln.split()
            if len(tokens) == 2 * d:
                pairs = [float(x) for x in tokens]
                entries.append([complex(re, im) for re, im in zip(pairs[0::2], pairs[1::2])])
            else:
                entries.append([complex(tok) for tok in tokens])
    except ValueError as e:
        raise UsageError(f"Arquivo de Kraus inválido ({path}): {e}")
    if len(entries) != d * r or any(len(row) != d for row in entries):
        raise UsageError(f"Arquivo de Kraus com forma inválida: esperado {r} blocos {d}×{d}")
    ops = np.array(entries, dtype=np.complex128).reshape(r, d, d)
    return KrausChannel(d=d, kraus_ops=tuple(ops))


def fmt(value: Any) -> Any:
    """Floats com 12 algarismos significativos; demais valores intactos."""
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value) or math.isinf(value):
            return str(value)
        return format(value, FLOAT_FORMAT)
    if isinstance(value, (np.integer,)):
        return int(value)
    return value


def round_floats(obj: Any) -> Any:
    """Aplica o formato de 12 algarismos recursivamente (floats continuam números no JSON)."""
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return round_floats(obj.tolist())
    if isinstance(obj, (float, np.floating)):
        text = fmt(obj)
        return float(text) if text not in ("nan", "inf", "-inf") else text
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def render_csv(comments: Sequence[str], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    for comment in comments:
        buffer.write(f"# {comment}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buffer.getvalue()


def render_json(payload: Any) -> str:
    return json.dumps(round_floats(payload), indent=2, ensure_ascii=False) + "\n"


def write_text(path: str | None, text: str) -> None:
    """Grava em `path` ou, sem caminho, devolve na saída padrão."""
    if path is None or path == "-":
        print(text, end="")
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    logger.info(f"Artefato gravado: path={path}, bytes={len(text.encode('utf-8'))}")
