import json
import math
from fractions import Fraction

import pytest

from ulamlab.core.numkernel import LogReal
from ulamlab.utils.config import DEFAULTS, Config, get_config
from ulamlab.utils.output import emit_table, format_value, render_table, write_json


def test_defaults_without_file(isolated_config):
    assert isolated_config.get('perm_max_n') == 9
    assert isolated_config.get('missing_key', 'fallback') == 'fallback'
    assert get_config() is isolated_config


def test_environment_overrides_file(isolated_config, monkeypatch):
    isolated_config.set('exact_max_cells', '100')
    assert Config().get('exact_max_cells') == 100
    monkeypatch.setenv('ULAMLAB_EXACT_MAX_CELLS', '50')
    assert Config().get('exact_max_cells') == 50


def test_file_values_are_coerced(tmp_path):
    path = tmp_path / 'settings'
    path.write_text("# caps\ncontour_tol = 1e-9\nthreads = 2  # workers\nlog_level = DEBUG\nnonsense\n")
    config = Config(path)
    assert config.get('contour_tol') == 1e-9
    assert config.get('threads') == 2
    assert config.get('log_level') == 'DEBUG'


def test_get_all_merges_defaults(isolated_config):
    merged = isolated_config.get_all()
    assert set(DEFAULTS) <= set(merged)


@pytest.mark.parametrize("value, expected", [
    (Fraction(19, 6), "19/6"),
    (Fraction(4, 2), "2"),
    (7, "7"),
    (0.1, "0.1"),
    (math.nan, "nan"),
    (None, ""),
    (True, "true"),
    (LogReal(-1, 2.5), "-1 2.5"),
])
def test_format_value(value, expected):
    assert format_value(value) == expected


def test_render_table_csv_and_json():
    rows = [{'a': 1, 'b': Fraction(1, 3)}, {'a': 2}]
    assert render_table(rows, ['a', 'b']) == "a,b\n1,1/3\n2,\n"
    decoded = json.loads(render_table(rows, ['a', 'b'], 'json'))
    assert decoded == [{'a': 1, 'b': '1/3'}, {'a': 2, 'b': None}]


def test_emit_table_to_stream_and_file(tmp_path):
    class Sink:
        text = ''

        def write(self, chunk):
            self.text += chunk

    sink = Sink()
    emit_table([{'x': 1}], ['x'], stream=sink)
    assert sink.text == "x\n1\n"
    out = tmp_path / 't.csv'
    emit_table([{'x': 1}], ['x'], out=str(out))
    assert out.read_text() == "x\n1\n"


def test_write_json(tmp_path):
    out = tmp_path / 'r.json'
    write_json({'v': Fraction(1, 2), 'w': math.inf, 'z': LogReal(1, 0.0)}, str(out))
    assert json.loads(out.read_text()) == {'v': '1/2', 'w': 'inf', 'z': {'sign': 1, 'log': 0.0}}
    with pytest.raises(OSError):
        write_json({}, '')
