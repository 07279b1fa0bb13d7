from __future__ import annotations

import numpy as np
import pytest

from app.config import AppConfig
from app.core.csscode import build_css
from app.core.engine import ProtocolEngine
from app.core.gfvec import LinearCode
from app.storage.codebank import CodeBank, CodeRecord

# d=2, n=8: 1ⁿ ∈ C e C ⊆ C⊥ para κ = 1, 2, 3 (k = 6, 4, 2)
D2_GENERATORS = ["11111111", "11110000", "11001100"]
# d=3, n=4: 1110·1110 = 3 ≡ 0
D3_GENERATORS = ["1110"]


def make_bank() -> CodeBank:
    bank = CodeBank()
    for kappa in (1, 2, 3):
        code = LinearCode.from_rows(D2_GENERATORS[:kappa], 2)
        bank.add(CodeRecord.from_css(build_css(code)))
    bank.add(CodeRecord.from_css(build_css(LinearCode.from_rows(D3_GENERATORS, 3))))
    return bank


@pytest.fixture
def small_bank() -> CodeBank:
    return make_bank()


@pytest.fixture
def app_config(tmp_path) -> AppConfig:
    return AppConfig(
        codebank_path=str(tmp_path / "codebank.txt"),
        grid_d2=128,
        grid_d3=32,
        refine_passes=6,
        log_dir=str(tmp_path / "logs"),
    )


@pytest.fixture
def engine(app_config: AppConfig, small_bank: CodeBank) -> ProtocolEngine:
    return ProtocolEngine(app_config, small_bank)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def example_css():
    """n=4, C=span{1111}, h = {1100, 1010}."""
    code = LinearCode.from_rows(["1111"], 2)
    return build_css(code, h_basis=[[1, 1, 0, 0], [1, 0, 1, 0]])
