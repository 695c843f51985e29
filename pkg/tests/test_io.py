import json

import numpy as np
import pytest

from ricci_homog.errors import ParseError, SchemaError
from ricci_homog.io import dumps, load, load_tensor, save, structure_to_dict, table_to_dict
from ricci_homog.structure import StructureData, validate_structure
from ricci_homog.tables import BUNDLED, bundled_path

from instances import random_structure


def test_structure_round_trip(tmp_path, rng):
    for s in (2, 3, 5):
        sd = random_structure(rng, s)
        save(sd, tmp_path / "sd.json")
        back = load(tmp_path / "sd.json")
        assert back == sd  # bit-faithful


def test_round_trip_without_zeta(tmp_path):
    sd = StructureData([1, 2], [0.1, 1 / 3], np.zeros((2, 2, 2)), None, "plain")
    save(sd, tmp_path / "sd.json")
    assert load(tmp_path / "sd.json") == sd


def test_table_round_trip(tmp_path):
    for build in BUNDLED.values():
        t = build()
        save(t, tmp_path / "t.json")
        assert load(tmp_path / "t.json") == t


def test_missing_gamma_names_field(tmp_path, rng):
    doc = structure_to_dict(random_structure(rng, 2))
    del doc["gamma"]
    (tmp_path / "sd.json").write_text(json.dumps(doc))
    with pytest.raises(SchemaError) as exc:
        load(tmp_path / "sd.json")
    assert exc.value.field == "gamma"
    assert "gamma" in str(exc.value)


def test_upper_entries_are_symmetrized(tmp_path):
    doc = {
        "label": "sparse",
        "s": 3,
        "d": [2, 2, 2],
        "b": [1.0, 1.0, 1.0],
        "gamma": [{"i": 1, "k": 2, "l": 3, "value": 1 / 3}],
        "zeta": [1 / 3, 1 / 3, 1 / 3],
    }
    (tmp_path / "sd.json").write_text(json.dumps(doc))
    sd = load(tmp_path / "sd.json")
    for p in [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]:
        assert sd.gamma[p] == 1 / 3
    assert np.count_nonzero(sd.gamma) == 6
    assert validate_structure(sd).ok


@pytest.mark.parametrize(
    "entry, field",
    [
        ({"i": 2, "k": 1, "l": 1, "value": 1.0}, "gamma[0]"),
        ({"i": 1, "k": 1, "l": 4, "value": 1.0}, "gamma[0]"),
        ({"i": 1, "k": 1, "value": 1.0}, "l"),
        ({"i": 1, "k": 1, "l": 1, "value": "x"}, "value"),
    ],
)
def test_bad_gamma_entries(tmp_path, entry, field):
    doc = {"s": 3, "d": [1, 1, 1], "b": [0, 0, 0], "gamma": [entry]}
    (tmp_path / "sd.json").write_text(json.dumps(doc))
    with pytest.raises(SchemaError) as exc:
        load(tmp_path / "sd.json")
    assert exc.value.field == field


def test_length_mismatch(tmp_path):
    doc = {"s": 2, "d": [1, 2, 3], "b": [0, 0], "gamma": []}
    (tmp_path / "sd.json").write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="length 2"):
        load(tmp_path / "sd.json")


def test_parse_error_reports_line(tmp_path):
    (tmp_path / "bad.json").write_text('{\n  "s": 2,\n  "d": [1, 2\n}')
    with pytest.raises(ParseError, match="line 4"):
        load(tmp_path / "bad.json")


def test_table_entries_need_a_lt_b(tmp_path):
    doc = {"dim_g": 3, "c": [{"a": 2, "b": 1, "e": 3, "value": 1.0}], "h_indices": [], "m_blocks": [[1, 2, 3]]}
    (tmp_path / "t.json").write_text(json.dumps(doc))
    with pytest.raises(SchemaError):
        load(tmp_path / "t.json")


def test_table_antisymmetry_implied(tmp_path):
    doc = {"dim_g": 3, "c": [{"a": 1, "b": 2, "e": 3, "value": 0.5}], "h_indices": [], "m_blocks": [[1, 2, 3]]}
    (tmp_path / "t.json").write_text(json.dumps(doc))
    t = load(tmp_path / "t.json")
    assert t.c[1, 0, 2] == -0.5
    assert table_to_dict(t) == doc


def test_tensor_file(tmp_path):
    (tmp_path / "z.json").write_text('{"z": [1, 0.5]}')
    assert load_tensor(tmp_path / "z.json").z.tolist() == [1.0, 0.5]


def test_dumps_seventeen_digits():
    text = dumps({"a": 0.1, "b": [1.0, 2], "c": None, "d": float("nan"), "e": True})
    doc = json.loads(text)
    assert '"a": 0.10000000000000001' in text
    assert doc == {"a": 0.1, "b": [1.0, 2], "c": None, "d": None, "e": True}


def test_bundled_files_match_builders():
    # the shipped tables are generated, never hand-edited
    for name, build in BUNDLED.items():
        assert load(bundled_path(name)) == build(), name
