import io
import os
import json

import numpy as np
import pytest

from src.SubRiem.baseproperties import BaseProperties
from src.SubRiem.templatecache import TemplateCache, evaluate_condition
from src.SubRiem.utils.cons import THREADS_ENVIRONMENT_VARIABLE, DEFAULT_MAX_THREADS
from src.SubRiem.utils.fileutils import JSONFile, can_read, can_write, read, write
from src.SubRiem.utils.hashing import SHA256
from src.SubRiem.utils.runlogger import RunLogger, get_run_id
from src.SubRiem.utils.serialization import format_float, dumps, canonical_dumps
from src.SubRiem.utils.utils import (
    is_float, parse_csv_floats, memoize, get_thread_count, max_abs, point_key
)


@pytest.mark.parametrize("value, expected", [
    ("1", True), ("-0.5", True), (".5", True), ("1e-3", True), ("+2.", True),
    ("", False), ("abc", False), ("1,2", False), ("--1", False), (None, False)
])
def test_is_float(value, expected):
    assert is_float(value) is expected


def test_parse_csv_floats():
    assert parse_csv_floats("1, 2,-0.5") == [1.0, 2.0, -0.5]
    assert parse_csv_floats("3,") == [3.0]

    with pytest.raises(ValueError, match = "'x' is not a number"):
        parse_csv_floats("1,x")


def test_memoize_caches_and_evicts():
    calls = []

    @memoize(max_entries = 2)
    def square(value):
        calls.append(value)
        return value * value

    assert [square(2), square(2), square(3)] == [4, 4, 9]
    assert calls == [2, 3]

    square(4)
    square(2)
    assert calls == [2, 3, 4, 2]

    square.cache_clear()
    square(3)
    assert calls[-1] == 3


def test_get_thread_count(monkeypatch):
    monkeypatch.delenv(THREADS_ENVIRONMENT_VARIABLE, raising = False)
    assert get_thread_count(3) == 3
    assert 1 <= get_thread_count() <= 4
    assert get_thread_count(0) >= 1

    monkeypatch.setenv(THREADS_ENVIRONMENT_VARIABLE, "2")
    assert get_thread_count(8) == 2
    assert get_thread_count(1) == 1
    assert get_thread_count() == min(2, DEFAULT_MAX_THREADS, os.cpu_count() or 1)

    monkeypatch.setenv(THREADS_ENVIRONMENT_VARIABLE, "64")
    assert get_thread_count() == min(DEFAULT_MAX_THREADS, os.cpu_count() or 1)
    assert get_thread_count(8) == 8
    assert get_thread_count(100) == 64

    monkeypatch.setenv(THREADS_ENVIRONMENT_VARIABLE, "many")
    assert get_thread_count(5) == 5


def test_max_abs_and_point_key():
    assert max_abs([[1.0, -3.0], [2.0, 0.5]]) == 3.0
    assert max_abs([]) == 0.0
    assert point_key(np.array([1, 2])) == (1.0, 2.0)


def test_sha256():
    assert SHA256().hash("abc") == \
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
    assert SHA256(hash_length = 8).hash(b"abc") == "ba7816bf8f01cfea"


def test_run_id_ignores_non_strings():
    assert get_run_id(["abc"]) == "ba7816bf8f01cfea"
    assert get_run_id(["a", None, "bc"]) == get_run_id(["abc"])
    assert len(get_run_id(["digest", "check"])) == 16


def test_run_logger_buffers_until_end_of_information():
    stream = io.StringIO()
    logger = RunLogger("0123", stream)

    logger.log(command = "check", spec = "heisenberg")
    assert stream.getvalue() == ""

    logger.log(exit_code = 0, end_of_information = True)
    entry = json.loads(stream.getvalue())

    assert entry["run_id"] == "0123"
    assert entry["command"] == "check"
    assert entry["exit_code"] == 0
    assert "end_of_information" not in entry
    assert logger.entries == [entry]
    assert logger.data == {}


@pytest.mark.parametrize("value, expected", [
    (1.0, "1.0"), (0.1, "0.10000000000000001"), (-2.0, "-2.0"), (0.5, "0.5"),
    (3.0, "3.0"), (1e22, "1e+22"), (-0.0, "0.0"), (np.float64(-0.0), "0.0")
])
def test_format_float(value, expected):
    assert format_float(value) == expected


def test_dumps_is_deterministic():
    report = {
        "array": np.array([[1.0, 0.5], [0.0, -2.0]]),
        "flag": np.bool_(True),
        "count": np.int64(3),
        "missing": None,
        "bad": float("nan"),
        "text": "λ"
    }

    text = dumps(report)
    decoded = json.loads(text)

    assert text == dumps(report)
    assert decoded["array"] == [[1.0, 0.5], [0.0, -2.0]]
    assert decoded["flag"] is True
    assert decoded["count"] == 3
    assert decoded["bad"] is None
    assert decoded["text"] == "λ"
    assert canonical_dumps({"b": 1, "a": 0.5}) == '{"a":0.5,"b":1}'


def test_negative_zero_is_written_as_zero():
    report = {"frame_first": np.array([-1.0, -0.0]), "value": -0.0}

    assert canonical_dumps(report) == '{"frame_first":[-1.0,0.0],"value":0.0}'
    assert "-0.0" not in dumps(report)


def test_file_helpers(tmp_path):
    file_path = str(tmp_path / "note.txt")

    assert not can_read(file_path)
    assert can_write(file_path)
    assert not can_write(str(tmp_path / "missing" / "note.txt"))
    assert read(file_path, "default") == "default"

    assert write(file_path, "hello")
    assert read(file_path) == "hello"


def test_json_file_cache(tmp_path):
    cache = JSONFile()
    file_path = str(tmp_path / "data.json")

    assert cache.load(file_path, {}) == {}
    assert cache.dump(file_path, {"a": [1, 2]})
    assert cache.load(file_path) == {"a": [1, 2]}
    assert cache.load(file_path) is cache.load(file_path)

    assert cache.dump(file_path, '{"b": true}')
    assert cache.load(file_path) == {"b": True}

    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding = "utf-8")
    assert cache.load(str(broken), "fallback") == "fallback"


@pytest.mark.parametrize("condition, expected", [
    ("has_tau", True),
    ("not has_tau", False),
    ("  not   not has_tau ", True),
    ("asymmetry", False),
    ("not asymmetry", True),
    ("unknown", False),
    ("not unknown", True),
    ("nothing", False)
])
def test_evaluate_condition(condition, expected):
    assert evaluate_condition({"has_tau": True, "asymmetry": False}, condition) is expected


@pytest.mark.parametrize("condition", ["asymmetry and has_tau", "(has_tau)", "", "not 1"])
def test_evaluate_condition_rejects_other_grammar(condition):
    with pytest.raises(ValueError, match = "Unsupported template condition"):
        evaluate_condition({"has_tau": True}, condition)


def test_replace_vars():
    template = "spec {SPEC}\n{if has_tau}\ntau = {TAU}\n{endif}\n{if not has_tau}\nno tau\n{endif}\nend"

    assert TemplateCache.replace_vars(template, {"spec": "su2", "tau": "1", "has_tau": True}) \
        == "spec su2\ntau = 1\nend"
    assert TemplateCache.replace_vars(template, {"spec": "su2", "tau": "", "has_tau": False}) \
        == "spec su2\nno tau\nend"

    with pytest.raises(ValueError, match = "Unmatched if"):
        TemplateCache.replace_vars("{if a}x", {})
    with pytest.raises(ValueError, match = "Unmatched endif"):
        TemplateCache.replace_vars("x{endif}", {})


def test_replace_vars_nested_sections_and_single_pass():
    template = "{if a}A{if not b}B{endif}C{endif}{if b}D{endif}|{FIRST}"

    assert TemplateCache.replace_vars(template, {"a": True, "b": False, "first": "{SECOND}",
                                                 "second": "x"}) == "ABC|{SECOND}"
    assert TemplateCache.replace_vars(template, {"a": False, "b": True}) == "D|{FIRST}"


def test_template_cache_loads_report_templates(tmp_path):
    cache = TemplateCache()
    assert cache.names == ["catalog", "check", "coeffs", "flow", "lie", "lvdef"]
    assert cache.render("unknown") == ""

    (tmp_path / "hello.txt").write_text("hello {NAME}", encoding = "utf-8")
    (tmp_path / "skip.md").write_text("ignored", encoding = "utf-8")
    custom = TemplateCache(str(tmp_path))

    assert custom.names == ["hello"]
    assert custom.render("hello", name = "world") == "hello world"


def test_base_properties_are_cached(heisenberg, heisenberg_rotated):
    properties = BaseProperties(heisenberg, "lie")

    assert properties.spec_digest is properties.spec_digest
    assert len(properties.spec_digest) == 64
    assert properties.run_id == get_run_id([properties.spec_digest, "lie"])
    assert properties.run_logger is properties.run_logger
    assert properties.lie_data is properties.lie_data
    assert properties.lie_data.trace_ad.tolist() == [0.0, 0.0, 0.0]

    assert BaseProperties(heisenberg, "check").run_id != properties.run_id
    assert BaseProperties(heisenberg_rotated, "lie").spec_digest != properties.spec_digest
