import logging
import os
import sys
from logging.handlers import RotatingFileHandler

from app.api.cli import dispatch
from app.config import AppConfig

log_format = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
date_format = "%Y-%m-%d %H:%M:%S"


def setup_logging(config: AppConfig) -> None:
    """
    Configuração central de logging: console (stderr, para não misturar com
    artefatos na saída padrão) e arquivo com rotação.
    """
    os.makedirs(config.log_dir, exist_ok=True)
    level = getattr(logging, config.log_level)

    root_logger = logging.getLogger()
    root_logger.setLevel(level)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(logging.Formatter(log_format, date_format))

    # máximo 10MB por arquivo, mantém 5 backups
    log_file = os.path.join(config.log_dir, "app.log")
    file_handler = RotatingFileHandler(
        log_file,
        maxBytes=10 * 1024 * 1024,
        backupCount=5,
        encoding="utf-8",
    )
    file_handler.setLevel(level)
    file_handler.setFormatter(logging.Formatter(log_format, date_format))

    root_logger.addHandler(console_handler)
    root_logger.addHandler(file_handler)
    logging.info(f"Logging configurado: file={log_file}, level={config.log_level}, env={config.env}")


def main() -> int:
    try:
        config = AppConfig.load_from_env()
    except RuntimeError as e:
        print(f"erro de configuração: {e}", file=sys.stderr)
        return 2
    setup_logging(config)
    return dispatch(sys.argv[1:], config)


if __name__ == "__main__":
    sys.exit(main())
