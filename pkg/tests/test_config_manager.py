import configparser
from unittest.mock import patch

import pytest

from utils import config_manager
from utils.config_manager import get_config_value, load_config


def make_config(text: str) -> configparser.ConfigParser:
    config = configparser.ConfigParser()
    config.read_string(text)
    return config


@pytest.fixture
def custom_config():
    """load_config を差し替えたテスト用設定"""
    config = make_config("""
[Tolerance]
law = 1e-6
spectral = 1e-5

[Divisibility]
chain_depth = 5
min_root_index = 64
branch_budget = 16

[Suite]
poisson_cases = 3
""")
    with patch('utils.config_manager.load_config', return_value=config):
        yield config


class TestGetConfigValue:
    """get_config_value のテスト"""

    @pytest.mark.parametrize('raw, expected', [('True', True), ('yes', True), ('1', True), ('off', False)])
    def test_bool(self, raw, expected):
        config = make_config(f"[LOGGING]\ndebug_mode = {raw}\n")

        assert get_config_value(config, 'LOGGING', 'debug_mode', False) is expected

    def test_int(self):
        config = make_config("[LOGGING]\nlog_retention_days = 30\n")

        assert get_config_value(config, 'LOGGING', 'log_retention_days', 7) == 30

    def test_missing_key_returns_default(self):
        assert get_config_value(make_config("[LOGGING]\n"), 'LOGGING', 'project_name', 'X') == 'X'

    def test_invalid_value_returns_default(self):
        config = make_config("[LOGGING]\nlog_retention_days = many\n")

        assert get_config_value(config, 'LOGGING', 'log_retention_days', 7) == 7


class TestLoadConfig:
    """設定ファイル読み込みのテスト"""

    def test_bundled_config(self):
        config = load_config()

        assert config.getint('Divisibility', 'min_root_index') == 1000000
        assert config.get('LOGGING', 'project_name') == 'FQGDivisibility'

    def test_missing_file(self, tmp_path, capsys):
        with patch('utils.config_manager.CONFIG_PATH', str(tmp_path / "none.ini")):
            with pytest.raises(FileNotFoundError):
                load_config()

        assert "設定ファイルが見つかりません" in capsys.readouterr().out

    def test_broken_file(self, tmp_path, capsys):
        path = tmp_path / "broken.ini"
        path.write_text("law = 1e-9\n", encoding='utf-8')

        with patch('utils.config_manager.CONFIG_PATH', str(path)):
            with pytest.raises(configparser.Error):
                load_config()

        assert "解析中にエラー" in capsys.readouterr().out


class TestGetters:
    """各設定値の取得テスト"""

    def test_overridden_values(self, custom_config):
        assert config_manager.get_law_tolerance() == 1e-6
        assert config_manager.get_spectral_tolerance() == 1e-5
        assert config_manager.get_chain_depth() == 5
        assert config_manager.get_min_root_index() == 64
        assert config_manager.get_branch_budget() == 16
        assert config_manager.get_suite_poisson_cases() == 3

    def test_fallbacks(self, custom_config):
        assert config_manager.get_series_tolerance() == 1e-12
        assert config_manager.get_gram_rank_cut() == 1e-10
        assert config_manager.get_psd_threshold() == 1e-9
        assert config_manager.get_dedup_tolerance() == 1e-6
        assert config_manager.get_wedderburn_seed() == 20240917
        assert config_manager.get_wedderburn_attempts() == 8
        assert config_manager.get_cesaro_max_iter() == 80
        assert config_manager.get_optimizer_starts() == 24
        assert config_manager.get_enumeration_max_dim() == 8
        assert config_manager.get_bisection_iterations() == 60
        assert config_manager.get_richardson_threshold() == 1e-8
        assert config_manager.get_suite_seed() == 0
