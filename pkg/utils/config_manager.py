import configparser
import os
from typing import Any


def get_config_path():
    return os.path.join(os.path.dirname(__file__), 'config.ini')


CONFIG_PATH = get_config_path()


def get_config_value(config: configparser.ConfigParser, section: str, key: str, default: Any) -> Any:
    try:
        value = config[section][key]
        # bool型の場合は文字列を正しくパース
        if isinstance(default, bool):
            return value.lower() in ('true', '1', 'yes', 'on')
        return type(default)(value)
    except (KeyError, ValueError, TypeError):
        return default


def load_config() -> configparser.ConfigParser:
    config = configparser.ConfigParser()
    try:
        with open(CONFIG_PATH, encoding='utf-8') as f:
            config.read_file(f)
    except FileNotFoundError:
        print(f"設定ファイルが見つかりません: {CONFIG_PATH}")
        raise
    except configparser.Error as e:
        print(f"設定ファイルの解析中にエラーが発生しました: {e}")
        raise
    return config


def get_law_tolerance() -> float:
    """代数法則の残差許容値を取得"""
    config = load_config()
    return config.getfloat('Tolerance', 'law', fallback=1e-9)


def get_spectral_tolerance() -> float:
    """スペクトル由来量の許容値を取得"""
    config = load_config()
    return config.getfloat('Tolerance', 'spectral', fallback=1e-7)


def get_series_tolerance() -> float:
    """exp/log 級数の打ち切り誤差を取得"""
    config = load_config()
    return config.getfloat('Tolerance', 'series', fallback=1e-12)


def get_gram_rank_cut() -> float:
    """Gram行列の零空間判定比を取得"""
    config = load_config()
    return config.getfloat('Tolerance', 'gram_rank_cut', fallback=1e-10)


def get_psd_threshold() -> float:
    """半正定値判定のしきい値を取得"""
    config = load_config()
    return config.getfloat('Tolerance', 'psd', fallback=1e-9)


def get_dedup_tolerance() -> float:
    """冪等状態の重複判定許容値を取得"""
    config = load_config()
    return config.getfloat('Tolerance', 'dedup', fallback=1e-6)


def get_wedderburn_seed() -> int:
    config = load_config()
    return config.getint('Wedderburn', 'seed', fallback=20240917)


def get_wedderburn_attempts() -> int:
    config = load_config()
    return config.getint('Wedderburn', 'max_attempts', fallback=8)


def get_cesaro_max_iter() -> int:
    config = load_config()
    return config.getint('Idempotent', 'cesaro_max_iter', fallback=80)


def get_optimizer_starts() -> int:
    """射影パターンごとの最適化開始点数を取得"""
    config = load_config()
    return config.getint('Idempotent', 'optimizer_starts', fallback=24)


def get_enumeration_max_dim() -> int:
    config = load_config()
    return config.getint('Idempotent', 'max_dim', fallback=8)


def get_bisection_iterations() -> int:
    config = load_config()
    return config.getint('Poisson', 'bisection_iterations', fallback=60)


def get_richardson_threshold() -> float:
    """Richardson外挿の収束しきい値を取得"""
    config = load_config()
    return config.getfloat('Divisibility', 'richardson_threshold', fallback=1e-8)


def get_branch_budget() -> int:
    """根の分岐探索の上限を取得"""
    config = load_config()
    return config.getint('Divisibility', 'branch_budget', fallback=4096)


def get_chain_depth() -> int:
    config = load_config()
    return config.getint('Divisibility', 'chain_depth', fallback=3)


def get_min_root_index() -> int:
    config = load_config()
    return config.getint('Divisibility', 'min_root_index', fallback=1000000)


def get_suite_seed() -> int:
    config = load_config()
    return config.getint('Suite', 'seed', fallback=0)


def get_suite_poisson_cases() -> int:
    """群ごとのPoisson状態サンプル数を取得"""
    config = load_config()
    return config.getint('Suite', 'poisson_cases', fallback=20)
