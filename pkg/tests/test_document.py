import json

import pytest

from schottky.config import FamilySpec, validate
from schottky.document import ConfigDocument, dumps, encode_system, load_config, loads_config, write_atomic
from schottky.errors import IoError, ParseError, SchemaError

PAIRS = {
    "version": 1,
    "pairs": [
        {"c": {"cx": -2, "cy": 0, "r": 1}, "c_prime": {"cx": 2, "cy": 0, "r": 1}},
        {"c": {"cx": 0, "cy": -2, "r": 0.5}, "c_prime": {"cx": 0, "cy": 2, "r": 0.5}, "twist": 0.3},
    ],
    "options": {"depth": 4},
}


def test_round_trip_is_idempotent():
    doc = ConfigDocument.from_dict(PAIRS)
    text = doc.serialize()
    again = loads_config(text)
    assert again.serialize() == text
    assert again.options["depth"] == 4


def test_system_from_pairs():
    s = ConfigDocument.from_dict(PAIRS).system()
    assert s.k == 2 and validate(s).admissible


def test_encoded_system_round_trips(two_pairs):
    doc = ConfigDocument.from_dict(encode_system(two_pairs))
    s = doc.system()
    for a, b in zip(s.pairs, two_pairs.pairs):
        assert a.map.isclose(b.map, 1e-15) and a.c == b.c


def test_missing_field_path():
    bad = json.loads(json.dumps(PAIRS))
    del bad["pairs"][0]["c"]["r"]
    with pytest.raises(SchemaError) as e:
        ConfigDocument.from_dict(bad)
    assert e.value.path == "pairs/0/c/r"


def test_unknown_field_rejected():
    bad = dict(PAIRS, colour="red")
    with pytest.raises(SchemaError) as e:
        ConfigDocument.from_dict(bad)
    assert e.value.path == "colour"


def test_only_one_source():
    with pytest.raises(SchemaError):
        ConfigDocument.from_dict({"version": 1, "pairs": [], "fatset": {}})


def test_parse_error_reports_line():
    with pytest.raises(ParseError) as e:
        loads_config('{\n  "version": 1,\n  oops\n}')
    assert e.value.line == 3


def test_missing_file(tmp_path):
    with pytest.raises(IoError):
        load_config(tmp_path / "nope.json")


def test_write_atomic(tmp_path):
    p = tmp_path / "out.json"
    write_atomic(p, "abc\n")
    assert p.read_text() == "abc\n"
    with pytest.raises(IoError):
        write_atomic(tmp_path / "missing" / "x.json", "x")


def test_dumps_canonical():
    assert dumps({"b": 1.0, "a": [0.1, float("inf")]}) == '{\n  "a": [0.10000000000000001, "inf"],\n  "b": 1\n}'


def test_family_document():
    doc = ConfigDocument.from_dict(
        {
            "version": 1,
            "family": {
                "families": [
                    {
                        "base": {"c": {"cx": 1.5, "cy": 0, "r": 0.2}, "c_prime": {"cx": -1.5, "cy": 0, "r": 0.2}},
                        "conjugator": [[[0.5, 0], 0], [0, 1]],
                    }
                ],
                "radius": 2,
            },
        }
    )
    fam = doc.build()
    assert isinstance(fam, FamilySpec) and len(fam.materialize()) == 5
    assert loads_config(doc.serialize()).serialize() == doc.serialize()


def test_construction_sections():
    for src in ("ends", "counterexample", "fatset"):
        doc = ConfigDocument.from_dict({"version": 1, src: {}})
        assert validate(doc.system()).admissible
