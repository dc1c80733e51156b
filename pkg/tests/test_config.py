from src.models.config import Config


def test_defaults_are_valid():
    result = Config.validate_config()
    assert result["valid"], result["errors"]


def test_config_groups():
    assert set(Config.get_random_config()) == {"seed", "coord_bound", "max_retries"}
    assert set(Config.get_search_config()) == {"kodaira_bound", "max_depth", "max_width"}
    assert Config.get_cache_config()["cache_type"] == "memory"


def test_invalid_values_are_reported(monkeypatch):
    monkeypatch.setattr(Config, "KODAIRA_BOUND", 0)
    monkeypatch.setattr(Config, "OUTPUT_FORMAT", "yaml")
    monkeypatch.setattr(Config, "CACHE_TYPE", "redis")
    result = Config.validate_config()
    assert not result["valid"]
    assert "KODAIRA_BOUND must be positive" in result["errors"]
    assert any("OUTPUT_FORMAT" in e for e in result["errors"])
    assert "Unknown CACHE_TYPE 'redis'" in result["errors"]


def test_warnings_do_not_invalidate(monkeypatch):
    monkeypatch.setattr(Config, "SEARCH_MAX_DEPTH", 9)
    monkeypatch.setattr(Config, "EXACT_CONFIRM", False)
    result = Config.validate_config()
    assert result["valid"]
    assert len(result["warnings"]) >= 2


def test_invalid_config_is_a_usage_error(monkeypatch):
    from app import EXIT_USAGE, main

    monkeypatch.setattr(Config, "RANDOM_COORD_BOUND", 2)
    assert main(["realize", "--realize", "pencil", "--d", "3"]) == EXIT_USAGE
