import logging
import os
import re
from datetime import datetime, timedelta
from logging.handlers import TimedRotatingFileHandler

from utils.config_manager import load_config, get_config_value

_HANDLER_TAG = '_fqg_handler'


def resolve_log_directory(config) -> str:
    log_directory = get_config_value(config, 'LOGGING', 'log_directory', 'logs')
    if not os.path.isabs(log_directory):
        project_root = os.path.dirname(os.path.dirname(__file__))
        log_directory = os.path.join(project_root, log_directory)
    return log_directory


def _remove_own_handlers(logger: logging.Logger) -> None:
    """同一プロセスで再初期化したときにハンドラが重複しないよう既存分を外す"""
    for handler in list(logger.handlers):
        if getattr(handler, _HANDLER_TAG, False):
            logger.removeHandler(handler)
            handler.close()


def setup_logging(config=None, console_level: int | None = None) -> str:
    """ローテーション付きファイルログとコンソールログを設定し、ログファイルのパスを返す"""
    if config is None:
        config = load_config()

    try:
        log_directory = resolve_log_directory(config)
        log_retention_days = get_config_value(config, 'LOGGING', 'log_retention_days', 7)
        project_name = get_config_value(config, 'LOGGING', 'project_name', 'FQGDivisibility')
        log_level = get_config_value(config, 'LOGGING', 'log_level', 'INFO')

        os.makedirs(log_directory, exist_ok=True)
        log_file = os.path.join(log_directory, f'{project_name}.log')

        file_handler = TimedRotatingFileHandler(
            filename=log_file,
            when='midnight',
            backupCount=log_retention_days,
            encoding='utf-8'
        )
        file_handler.suffix = "%Y-%m-%d.log"
        formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
        file_handler.setFormatter(formatter)
        setattr(file_handler, _HANDLER_TAG, True)

        root_logger = logging.getLogger()
        _remove_own_handlers(root_logger)

        level = logging.getLevelName(log_level.upper())
        if isinstance(level, int):
            root_logger.setLevel(level)
        else:
            root_logger.setLevel(logging.INFO)
            logging.warning(f"無効なログレベル '{log_level}' が指定されました。INFOを使用します。")

        root_logger.addHandler(file_handler)

        # 標準出力はレポート用なのでコンソールログは標準エラーへ
        console_handler = logging.StreamHandler()
        console_handler.setFormatter(logging.Formatter('%(levelname)s: %(message)s'))
        console_handler.setLevel(logging.WARNING if console_level is None else console_level)
        setattr(console_handler, _HANDLER_TAG, True)
        root_logger.addHandler(console_handler)

        cleanup_old_logs(log_directory, log_retention_days, project_name)
        setup_debug_logging(config)

        logging.info(f"ログシステムが初期化されました: {log_file}")
        return log_file

    except PermissionError as e:
        raise PermissionError(f"ログディレクトリの作成権限がありません: {e}")
    except OSError as e:
        raise OSError(f"ログ設定の初期化中にエラーが発生しました: {e}")


def cleanup_old_logs(log_directory: str, retention_days: int, project_name: str) -> int:
    deleted_count = 0
    try:
        now = datetime.now()
        rotated_log_pattern = rf'{re.escape(project_name)}\.log\.\d{{4}}-\d{{2}}-\d{{2}}\.log$'

        for filename in os.listdir(log_directory):
            if not re.match(rotated_log_pattern, filename):
                continue
            file_path = os.path.join(log_directory, filename)
            try:
                file_modification_time = datetime.fromtimestamp(os.path.getmtime(file_path))
                if now - file_modification_time >= timedelta(days=retention_days):
                    os.remove(file_path)
                    logging.info(f"古いログファイルを削除しました: {filename}")
                    deleted_count += 1
            except OSError as e:
                logging.error(f"ログファイルの削除中にエラーが発生しました {filename}: {str(e)}")

        if deleted_count > 0:
            logging.info(f"合計 {deleted_count} 個の古いログファイルを削除しました")

    except OSError as e:
        logging.error(f"ログクリーンアップ処理中にエラーが発生しました: {str(e)}")
    return deleted_count


def setup_debug_logging(config=None):
    """debug_mode 有効時は数値計算モジュール（service パッケージ）の DEBUG ログを debug.log に出す"""
    if config is None:
        config = load_config()

    debug_mode = get_config_value(config, 'LOGGING', 'debug_mode', False)
    if not debug_mode:
        return None

    try:
        log_directory = resolve_log_directory(config)
        os.makedirs(log_directory, exist_ok=True)

        debug_logger = logging.getLogger('service')
        _remove_own_handlers(debug_logger)
        debug_logger.setLevel(logging.DEBUG)

        debug_log_path = os.path.join(log_directory, 'debug.log')
        debug_handler = logging.FileHandler(debug_log_path, encoding='utf-8')
        debug_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s'
        ))
        setattr(debug_handler, _HANDLER_TAG, True)
        debug_logger.addHandler(debug_handler)

        logging.info(f"デバッグログが有効化されました: {debug_log_path}")
        return debug_logger

    except OSError as e:
        logging.error(f"デバッグログ設定中にエラーが発生しました: {str(e)}")
        return None
