import math

import pytest
from hypothesis import given, settings, strategies as st

from adiabatic_qp import ConfigError, parse_config
from adiabatic_qp.config import RunConfig
from adiabatic_qp.io.output import OutputTable, SCHEMAS, Writer, parse_table, read_json, read_table

BASE = """
fast: {kind: kronig-penney, height: 10}
slow: {coefficients: [[1, 5.0, 0.0]]}
energy: {value: 8.0, window: [7.5, 8.5], grid: [7.5, 8.0, 8.5]}
epsilon: {n: [5, 10]}
tolerances: {action: 1e-13}
"""


def test_defaults_and_numeric_strings():
    cfg = parse_config(BASE)
    assert cfg.tolerances["action"] == 1e-13
    assert cfg.trajectory["samples"] == 8
    assert cfg.epsilon_n == (5, 10)
    assert cfg.fast_potential().kind == "piecewise-constant"


def test_dump_round_trip():
    cfg = parse_config(BASE)
    again = parse_config(cfg.dump())
    assert again == cfg
    assert again.digest() == cfg.digest()


def test_digest_ignores_output_and_jobs():
    cfg = parse_config(BASE)
    assert cfg.override(output="elsewhere", jobs=4).digest() == cfg.digest()
    assert cfg.override(seed=7).digest() != cfg.digest()


@pytest.mark.parametrize("text, field", [
    ("slow: {}\n", "fast"),
    ("fast: {kind: sine}\n", "fast.kind"),
    ("fast: {kind: piecewise-constant, segments: [[0.4, 1], [0.5, 0]]}\n", "fast.segments"),
    ("fast: {kind: free}\nenergy: {window: [3, 1]}\n", "energy.window"),
    ("fast: {kind: free}\nepsilon: {n: [10, 5]}\n", "epsilon.n"),
    ("fast: {kind: free}\ntrajectory: {samples: 3}\n", "trajectory.samples"),
    ("fast: {kind: free}\ntrajectory: {rule: simpson}\n", "trajectory.rule"),
    ("fast: {kind: free}\ntolerances: {bracket: [1.1, 1.3]}\n", "tolerances.bracket"),
    ("fast: {kind: free}\nbogus: 1\n", "bogus"),
    ("fast: {kind: free}\nslow: {coefficients: [[1, x, 0]]}\n", "slow.coefficients[0][1]"),
    ("fast: [\n", "line 2, column 1"),
])
def test_config_errors_name_the_field(text, field):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.field == field


def test_require_names_missing_energy_key():
    cfg = parse_config("fast: {kind: free}\n")
    with pytest.raises(ConfigError) as exc:
        cfg.require("grid")
    assert exc.value.field == "energy.grid"


@settings(max_examples=30, deadline=None)
@given(rows=st.lists(st.tuples(st.integers(0, 50), st.floats(allow_nan=False, allow_infinity=False, width=64),
                               st.floats(-1e6, 1e6), st.booleans()), max_size=8))
def test_table_round_trip(rows):
    t = OutputTable("bands.v1", SCHEMAS["bands.v1"], rows, {"schema": "bands.v1", "seed": 0})
    back = parse_table(t.render())
    assert back.columns == t.columns and back.meta["schema"] == "bands.v1"
    for a, b in zip(rows, back.rows):
        assert b[0] == a[0] and float(b[1]) == a[1] and float(b[2]) == a[2] and b[3] == int(a[3])


def test_table_rejects_wrong_columns():
    with pytest.raises(ValueError):
        OutputTable("bands.v1", ("E",), [])


def test_writer_files_are_readable(tmp_path):
    cfg = parse_config(BASE)
    w = Writer(tmp_path, cfg)
    w.table("v.csv", "verify.v1", [(8.0, 0.5, 0.3, 0.33, 0.9, 1e-3, True), (8.0, 0.25, math.nan, 0.33, math.nan, 0.0, False)])
    w.json("s.json", "verify.v1", {"x": [1.5, math.inf], "ok": True})
    t = read_table(tmp_path / "v.csv")
    assert t.meta["config_sha256"] == cfg.digest()
    assert t.columns == SCHEMAS["verify.v1"]
    assert math.isnan(t.rows[1][2])
    j = read_json(tmp_path / "s.json")
    assert j["x"] == [1.5, None] and j["provenance"]["schema"] == "verify.v1"
    assert [p.name for p in w.written] == ["v.csv", "s.json"]


def test_unknown_kind_in_mapping():
    with pytest.raises(ConfigError):
        RunConfig.from_mapping({"fast": {"kind": "free", "height": 1}})
