"""Basic unit tests for the application class and report rendering."""

import io
import json
from unittest.mock import Mock, patch

import pytest

from main import parse_arguments
from src.app.app import App
from src.app.commands import EXACT_VERTEX_LIMIT, EXIT_FAILED, RunConfig, _extract, cmd_build
from src.app.reporting import emit, format_value, make_document, render_text
from src.config import PackingConfig
from src.errors import (
    BudgetExceededError,
    InvalidParamsError,
    PackingFormatError,
    VerificationError,
)
from src.lattice_graph import build_graph
from src.packing import VerificationReport
from src.params import PackingParams


def make_app(*argv):
    return App(parse_arguments(list(argv)))


@pytest.mark.unit
def test_app_initialization():
    """Test that App keeps its arguments."""
    app = make_app('bounds', '--dim', '2')

    assert app.args.command == 'bounds'
    assert hasattr(app, 'run')


@pytest.mark.unit
def test_log_action():
    """Test that log_action prints correctly formatted messages to stderr."""
    app = make_app('bounds', '--dim', '2')

    with patch('builtins.print') as mock_print:
        app.log_action("Test Action", "Test details")

    message = mock_print.call_args[0][0]
    assert "Action: Test Action - Test details" in message
    assert message.startswith("[")
    assert mock_print.call_args[1]['file'] is not None


@pytest.mark.unit
def test_paper_curve_params():
    app = make_app('bounds', '--dim', '3', '--paper-curve', '--r', '5')
    params = app.resolve_params()

    assert (params.r, params.s) == (18, 162)


@pytest.mark.unit
def test_budget_override_applied():
    config = make_app('build', '--dim', '2', '--budget-vertices', '50').build_run_config()

    assert config.settings.budget_vertices == 50


@pytest.mark.unit
def test_negative_budget_rejected():
    assert make_app('build', '--dim', '2', '--budget-vertices', '-5').run() == 1


@pytest.mark.unit
@pytest.mark.parametrize(
    "error, code",
    [
        (BudgetExceededError("vertices", 100, 10), 2),
        (VerificationError("overlap"), 3),
        (PackingFormatError("bad", 1, "header"), 3),
        (InvalidParamsError("bad n"), 1),
        (FileNotFoundError("absent"), 1),
        (ZeroDivisionError("boom"), 1),
    ],
)
def test_error_exit_codes(error, code):
    """Library errors map to exit codes."""
    app = make_app('bounds', '--dim', '2')
    failing = Mock(side_effect=error)

    with patch.dict('src.app.app.DISPATCH', {'bounds': failing}), patch('traceback.print_exc'):
        assert app.run() == code
    failing.assert_called_once()


@pytest.mark.unit
def test_successful_run(capsys):
    assert make_app('bounds', '--dim', '2', '--format', 'json', '--deterministic').run() == 0

    document = json.loads(capsys.readouterr().out)
    assert document['command'] == 'bounds'


@pytest.mark.unit
class TestRunConfig:
    """Test RunConfig validation."""

    def test_needs_params(self):
        with pytest.raises(InvalidParamsError):
            RunConfig(command='build')

    def test_unknown_command(self):
        with pytest.raises(InvalidParamsError):
            RunConfig(command='plot')

    def test_verify_needs_path(self):
        with pytest.raises(InvalidParamsError):
            RunConfig(command='verify')


@pytest.mark.unit
class TestReporting:
    """Test report rendering."""

    def test_significant_digits(self):
        assert format_value(3.14159265358979, 6) == '3.14159'
        assert format_value(None, 6) == 'invalid'
        assert format_value(True, 6) == 'yes'
        assert format_value(float('-inf'), 6) == '-inf'
        assert format_value(25, 6) == '25'

    def test_deterministic_document_has_no_timestamp(self):
        document = make_document('bounds', {'a': 1.0}, deterministic=True, timings={'graph': 0.5})

        assert 'timestamp' not in document
        assert 'timings_seconds' not in document

    def test_timestamped_document(self):
        document = make_document('bounds', {'a': 1.0}, deterministic=False, timings={'graph': 0.5})

        assert 'timestamp' in document
        assert document['timings_seconds'] == {'graph': 0.5}

    def test_text_table_flattens(self):
        text = render_text({'result': {'params': {'n': 2}, 'rows': [{'x': 1}]}}, 6)
        rows = [line.split() for line in text.splitlines()]

        assert ['result.params.n', '2'] in rows
        assert ['result.rows[0].x', '1'] in rows

    def test_json_is_sorted_and_full_precision(self):
        stream = io.StringIO()
        emit({'b': 0.1234567891234, 'a': 1}, 'json', 6, stream)

        assert stream.getvalue().index('"a"') < stream.getvalue().index('"b"')
        assert json.loads(stream.getvalue())['b'] == 0.1234567891234


@pytest.mark.unit
class TestBuildCommandUnit:
    """Test build guards without a subprocess."""

    def test_exact_refused_above_vertex_limit(self):
        g = build_graph(PackingParams(n=2, r=1, s=14), PackingConfig())

        assert g.vertex_count > EXACT_VERTEX_LIMIT
        with pytest.raises(BudgetExceededError) as info:
            _extract('exact', g, PackingConfig())
        assert info.value.budget == EXACT_VERTEX_LIMIT

    def test_failed_verification_writes_no_file(self, tmp_path, mocker, capsys):
        failing = VerificationReport(
            separated=False,
            contained=True,
            min_squared_distance=0,
            violations=(((0, 1), 0),),
            outside=(),
            method='all-pairs',
        )
        mocker.patch('src.app.commands.verify', return_value=failing)
        target = tmp_path / 'p.txt'
        config = RunConfig(
            command='build',
            params=PackingParams(n=2, r=1, s=8),
            output=target,
            fmt='json',
            deterministic=True,
        )

        assert cmd_build(config) == EXIT_FAILED
        assert not target.exists()
        assert json.loads(capsys.readouterr().out)['result']['verification']['passed'] is False
