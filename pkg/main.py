import logging
import sys

from app.cli import EXIT_INPUT, parse_config, run
from utils.log_rotation import setup_logging

logger = logging.getLogger(__name__)


def main(argv: list[str] | None = None):
    setup_logging()

    config = parse_config(argv)
    try:
        status = run(config)
    except FileNotFoundError as e:
        logger.error(f"設定ファイルエラー: {e}")
        sys.exit(EXIT_INPUT)
    except Exception as e:
        logger.error(f"予期せぬエラーが発生しました: {e}")
        sys.exit(1)
    sys.exit(status)


if __name__ == "__main__":
    main()
