"""Tests for configuration loading, parameter validation and errors."""

import json

import pytest

from src.config import (
    DEFAULT_CONFIG_PATH,
    EXACT_SHELL_LIMIT,
    THREADS_ENV_VAR,
    PackingConfig,
    get_packing_config,
    worker_count,
)
from src.errors import BudgetExceededError, InvalidParamsError, PackingFormatError
from src.params import PackingParams


@pytest.mark.unit
class TestPackingConfig:
    """Test the JSON configuration layer."""

    def test_default_file_matches_constants(self):
        """The shipped config file carries the same defaults as the module constants."""
        assert DEFAULT_CONFIG_PATH.exists()
        assert get_packing_config() == PackingConfig()
        assert get_packing_config().exact_shell_limit == EXACT_SHELL_LIMIT

    def test_missing_file_falls_back_to_defaults(self, tmp_path):
        """A missing config file gives the built-in defaults."""
        assert get_packing_config(tmp_path / "absent.json") == PackingConfig()

    def test_values_are_read(self, tmp_path):
        """Entries override the defaults; unknown keys are ignored."""
        path = tmp_path / "config.json"
        path.write_text(json.dumps({
            "budgets": {
                "budget_vertices": {"default": 1234, "min": 1, "max": 10**9},
                "not_a_key": {"default": 5},
            },
        }))

        config = get_packing_config(path)

        assert config.budget_vertices == 1234
        assert config.mc_samples == PackingConfig().mc_samples

    def test_out_of_range_value_rejected(self, tmp_path):
        """A default outside its min/max is an error."""
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"monte_carlo": {"mc_shards": {"default": 0, "min": 1, "max": 64}}}))

        with pytest.raises(InvalidParamsError, match="mc_shards"):
            get_packing_config(path)

    def test_with_overrides_skips_none(self):
        """None overrides leave values untouched."""
        config = PackingConfig().with_overrides(budget_vertices=10, mc_samples=None)

        assert config.budget_vertices == 10
        assert config.mc_samples == PackingConfig().mc_samples


@pytest.mark.unit
class TestWorkerCount:
    """Test the PACKING_FORGE_THREADS cap."""

    def test_cap_of_one(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV_VAR, "1")
        assert worker_count() == 1

    def test_non_positive_means_one(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV_VAR, "0")
        assert worker_count() == 1

    def test_garbage_is_ignored(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV_VAR, "many")
        monkeypatch.setattr("os.cpu_count", lambda: 3)
        assert worker_count() == 3

    def test_unset_uses_cpu_count(self, monkeypatch):
        monkeypatch.delenv(THREADS_ENV_VAR, raising=False)
        monkeypatch.setattr("os.cpu_count", lambda: 6)
        assert worker_count() == 6


@pytest.mark.unit
class TestPackingParams:
    """Test parameter validation."""

    def test_derived_sizes(self):
        p = PackingParams(n=2, r=1, s=8)

        assert p.half_side == 4
        assert p.vertex_count == 81
        assert p.outer_side == 10
        assert p.edge_limit_sq == 3

    @pytest.mark.parametrize("n, r, s", [(0, 1, 8), (2, 0, 8), (2, 1, 7), (2, 1, -2)])
    def test_invalid_values(self, n, r, s):
        with pytest.raises(InvalidParamsError):
            PackingParams(n=n, r=r, s=s)

    def test_non_integers_rejected(self):
        with pytest.raises(InvalidParamsError, match="integer"):
            PackingParams(n=2, r=1.5, s=8)  # type: ignore[arg-type]
        with pytest.raises(InvalidParamsError, match="integer"):
            PackingParams(n=True, r=1, s=8)

    def test_paper_regime_needs_even_radius(self):
        with pytest.raises(InvalidParamsError, match="even r"):
            PackingParams(n=2, r=3, s=8, paper_regime=True)
        assert PackingParams(n=2, r=4, s=8, paper_regime=True).r == 4


@pytest.mark.unit
class TestErrors:
    """Test error messages and hierarchy."""

    def test_budget_error_carries_counts(self):
        error = BudgetExceededError("vertices", 4375**3, 10**7)

        assert error.predicted == 83_740_234_375
        assert error.budget == 10**7
        assert "83740234375" in str(error)
        assert isinstance(error, RuntimeError)

    def test_huge_prediction_abbreviated(self):
        assert "~2^" in str(BudgetExceededError("vertices", 3**400, 10))

    def test_format_error_location(self):
        error = PackingFormatError("bad value", 3, "center")

        assert str(error) == "line 3, field 'center': bad value"
        assert isinstance(error, ValueError)
