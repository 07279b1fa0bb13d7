from dataclasses import dataclass
import os
import logging
from dotenv import load_dotenv

logger = logging.getLogger(__name__)


def _int_env(name: str, default: int, minimum: int = 1) -> int:
    raw = os.getenv(name, str(default))
    try:
        value = int(raw)
    except ValueError:
        raise RuntimeError(f"Variável de ambiente {name} precisa ser um inteiro (recebido {raw!r}).")
    if value < minimum:
        raise RuntimeError(f"Variável de ambiente {name}={value} abaixo do mínimo {minimum}.")
    return value


@dataclass(frozen=True)
class AppConfig:
    """
    Configurações da bancada.

    Centraliza caminhos, tetos de enumeração e resolução das grades
    numéricas para facilitar revisão e testes.
    """
    codebank_path: str = "codebank.txt"
    enum_cap: int = 1 << 24  # teto de palavras enumeradas em coclasses e espectros
    grid_d2: int = 512  # grade base do simplexo para d=2
    grid_d3: int = 64  # grade base para d ≥ 3
    refine_passes: int = 12
    block_multiple: int = 4  # granularidade dos comprimentos de bloco
    log_dir: str = "logs"
    log_level: str = "INFO"
    env: str = "dev"  # "dev" ou "prod"

    def grid_for(self, size: int) -> int:
        """Grade base para um simplexo de `size` símbolos; acima de 4 símbolos usa grid_d3/4."""
        if size <= 2:
            return self.grid_d2
        if size <= 4:
            return self.grid_d3
        return max(2, self.grid_d3 // 4)

    def pair_grid_for(self, size: int) -> int:
        """Grade de cada fator nas minimizações sobre pares de simplexos (mínimo 8)."""
        if size <= 3:
            return max(8, self.grid_for(size) // 2)
        return max(8, self.grid_for(size) // 8)

    @classmethod
    def load_from_env(cls) -> "AppConfig":
        """
        Carrega configuração a partir de variáveis de ambiente.
        Primeiro tenta carregar do arquivo .env, depois do ambiente do sistema.
        Valores numéricos inválidos levantam RuntimeError.
        """
        load_dotenv()

        env = os.getenv("ENV", "dev").lower()
        if env not in ("dev", "prod"):
            logger.warning(f"ENV inválido '{env}', usando 'dev' como padrão")
            env = "dev"

        log_level = os.getenv("CSSQKD_LOG_LEVEL", "INFO").upper()
        if log_level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise RuntimeError(f"CSSQKD_LOG_LEVEL inválido: {log_level!r}")

        return cls(
            codebank_path=os.getenv("CSSQKD_CODEBANK", "codebank.txt"),
            enum_cap=_int_env("CSSQKD_ENUM_CAP", 1 << 24),
            grid_d2=_int_env("CSSQKD_GRID_D2", 512, minimum=2),
            grid_d3=_int_env("CSSQKD_GRID_D3", 64, minimum=2),
            refine_passes=_int_env("CSSQKD_REFINE_PASSES", 12, minimum=0),
            block_multiple=_int_env("CSSQKD_BLOCK_MULTIPLE", 4),
            log_dir=os.getenv("CSSQKD_LOG_DIR", "logs"),
            log_level=log_level,
            env=env,
        )
