"""
Banco de códigos CSS pré-calculados.

Formato texto, um registro por código:

    d n kappa k
    <kappa linhas geradoras de C>
    <k linhas h_i>

Cada linha é a palavra escrita como dígitos ('0110...'); para d > 10 os
dígitos vão separados por espaço. Linhas vazias e '#' são ignoradas.
"""
import logging
import os
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
import numpy.typing as npt

from ..core.csscode import CssCode, build_css
from ..core.errors import CodebankMissError, UsageError
from ..core.gfvec import DEFAULT_ENUM_CAP, LinearCode, make_word, word_to_str
from ..core.models import DecodeRule

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CodeRecord:
    d: int
    n: int
    generators: npt.NDArray[np.int64]
    h_basis: npt.NDArray[np.int64]

    @property
    def kappa(self) -> int:
        return int(self.generators.shape[0])

    @property
    def k(self) -> int:
        return int(self.h_basis.shape[0])

    @classmethod
    def from_css(cls, css: CssCode) -> "CodeRecord":
        return cls(d=css.d, n=css.n, generators=np.array(css.code.basis), h_basis=np.array(css.h_basis))

    def to_css(
        self,
        rule: DecodeRule = DecodeRule.MIN_ENTROPY,
        second_half: Optional[npt.ArrayLike] = None,
        enum_cap: int = DEFAULT_ENUM_CAP,
    ) -> CssCode:
        code = LinearCode(d=self.d, n=self.n, basis=self.generators)
        return build_css(code, rule=rule, h_basis=self.h_basis, second_half=second_half, enum_cap=enum_cap)


def _row_to_text(row: npt.NDArray[np.int64], d: int) -> str:
    if d <= 10:
        return word_to_str(row)
    return " ".join(str(int(x)) for x in row)


def _row_from_text(line: str, d: int, n: int) -> npt.NDArray[np.int64]:
    parts = line.split()
    word = make_word([int(p) for p in parts] if len(parts) > 1 else line.strip(), d)
    if word.size != n:
        raise UsageError(f"Linha com {word.size} dígitos em registro de comprimento {n}")
    return word


def format_codebank(records: Iterable[CodeRecord]) -> str:
    lines: List[str] = []
    for rec in records:
        lines.append(f"{rec.d} {rec.n} {rec.kappa} {rec.k}")
        lines.extend(_row_to_text(r, rec.d) for r in rec.generators)
        lines.extend(_row_to_text(r, rec.d) for r in rec.h_basis)
    return "\n".join(lines) + ("\n" if lines else "")


def parse_codebank(text: str) -> List[CodeRecord]:
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln and not ln.startswith("#")]
    records: List[CodeRecord] = []
    pos = 0
    while pos < len(lines):
        header = lines[pos].split()
        if len(header) != 4:
            raise UsageError(f"Cabeçalho de registro inválido: {lines[pos]!r}")
        d, n, kappa, k = (int(x) for x in header)
        if n != 2 * kappa + k:
            raise UsageError(f"Registro inconsistente: n={n}, kappa={kappa}, k={k}")
        body = lines[pos + 1:pos + 1 + kappa + k]
        if len(body) != kappa + k:
            raise UsageError(f"Registro truncado: d={d}, n={n}, kappa={kappa}, k={k}")
        rows = [_row_from_text(r, d, n) for r in body]
        records.append(
            CodeRecord(
                d=d,
                n=n,
                generators=np.array(rows[:kappa], dtype=np.int64).reshape(kappa, n),
                h_basis=np.array(rows[kappa:], dtype=np.int64).reshape(k, n),
            )
        )
        pos += 1 + kappa + k
    return records


class CodeBank:
    """
    Repositório de códigos indexado por (d, n, k).
    """

    def __init__(self, records: Iterable[CodeRecord] = ()) -> None:
        self._records: Dict[Tuple[int, int, int], CodeRecord] = {}
        self._built: Dict[Tuple[int, int, int, DecodeRule], CssCode] = {}
        for rec in records:
            self.add(rec)

    @classmethod
    def load(cls, path: str) -> "CodeBank":
        if not os.path.exists(path):
            raise UsageError(f"Banco de códigos não encontrado: {path}")
        with open(path, encoding="utf-8") as fh:
            bank = cls(parse_codebank(fh.read()))
        logger.info(f"Banco de códigos carregado: path={path}, records={len(bank)}")
        return bank

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(format_codebank(self.records()))
        logger.info(f"Banco de códigos gravado: path={path}, records={len(self)}")

    def __len__(self) -> int:
        return len(self._records)

    def add(self, record: CodeRecord) -> None:
        key = (record.d, record.n, record.k)
        if key in self._records:
            logger.debug(f"Registro substituído no banco: d={record.d}, n={record.n}, k={record.k}")
        self._records[key] = record
        for cached in [c for c in self._built if c[:3] == key]:
            del self._built[cached]

    def records(self) -> List[CodeRecord]:
        return [self._records[key] for key in sorted(self._records)]

    def lengths(self, d: int) -> List[int]:
        return sorted({n for (dd, n, _) in self._records if dd == d})

    def find(self, d: int, n: int, k: int) -> CodeRecord:
        record = self._records.get((d, n, k))
        if record is None:
            raise CodebankMissError(f"Nenhum código no banco para d={d}, n={n}, k={k}")
        return record

    def best_at_most(self, d: int, n: int, k_max: int) -> CodeRecord:
        """Código de comprimento n com o maior k ≤ k_max (k ≥ 1)."""
        options = [k for (dd, nn, k) in self._records if dd == d and nn == n and 1 <= k <= k_max]
        if not options:
            raise CodebankMissError(f"Nenhum código no banco para d={d}, n={n}, k ≤ {k_max}")
        return self._records[(d, n, max(options))]

    def smallest_at_least(self, d: int, n: int, k_min: int) -> CodeRecord:
        options = [k for (dd, nn, k) in self._records if dd == d and nn == n and k >= max(k_min, 1)]
        if not options:
            raise CodebankMissError(f"Nenhum código no banco para d={d}, n={n}, k ≥ {k_min}")
        return self._records[(d, n, min(options))]

    def css(
        self,
        record: CodeRecord,
        rule: DecodeRule = DecodeRule.MIN_ENTROPY,
        enum_cap: int = DEFAULT_ENUM_CAP,
    ) -> CssCode:
        """Código CSS do registro, montado uma vez por regra (o memo de representantes é reaproveitado)."""
        key = (record.d, record.n, record.k, rule)
        css = self._built.get(key)
        if css is None:
            css = record.to_css(rule=rule, enum_cap=enum_cap)
            self._built[key] = css
        return css
