from __future__ import annotations

import json

import pytest

from polyhardy import (
    Grade,
    PolynomialParseError,
    Scenario,
    builtin_corpus,
    dump_scenario,
    load_scenario,
    named_corpus,
    parse_polynomial,
    random_pair_scenario,
    scenario_from_json,
    scenario_to_json,
)


def test_json_round_trip():
    sc = Scenario(
        label="demo",
        grade=Grade(2, 4, 3, 2, safe_margin=1),
        generators=("z - z1", "z*z2"),
        pipeline=("orbit", "wandering"),
        options=(("force", True), ("margin", 3)),
    )
    data = scenario_to_json(sc)
    back = scenario_from_json(data)
    assert back == sc


def test_grade_json_keys():
    sc = Scenario(label="g", grade=Grade(1, 5, 4, 3), generators=("z",))
    data = scenario_to_json(sc)
    assert set(data["grade"]) == {"n", "D", "N", "d_E", "safe_margin"}
    assert data["grade"]["D"] == 5
    assert data["grade"]["N"] == 4
    assert data["grade"]["d_E"] == 3


def test_defaults_for_missing_pipeline_and_options():
    data = {
        "label": "min",
        "grade": {"n": 1, "D": 4, "N": 4, "d_E": 1},
        "generators": ["z - z1"],
    }
    sc = scenario_from_json(data)
    assert sc.pipeline == ("orbit", "wandering", "extract", "verify", "classify")
    assert sc.options == ()
    assert sc.grade.safe_margin == 1


def test_missing_grade_key_rejected():
    with pytest.raises(PolynomialParseError):
        scenario_from_json({"label": "bad", "generators": ["z"]})
    with pytest.raises(PolynomialParseError):
        scenario_from_json(
            {"label": "bad", "grade": {"n": 1, "D": 4}, "generators": ["z"]}
        )


def test_file_round_trip(tmp_path):
    sc = Scenario(label="file", grade=Grade(1, 5, 5, 1), generators=("z - z1",))
    path = tmp_path / "sc.json"
    dump_scenario(sc, path)
    text = path.read_text()
    json.loads(text)  # valid JSON on disk
    assert load_scenario(path) == sc


def test_load_rejects_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(PolynomialParseError):
        load_scenario(path)


def test_random_pair_scenario_deterministic():
    a = random_pair_scenario(7)
    b = random_pair_scenario(7)
    c = random_pair_scenario(8)
    assert a.generators == b.generators
    assert a.label == b.label
    assert a != c
    assert a.generators != c.generators


def test_random_pair_scenario_shape():
    sc = random_pair_scenario(3)
    assert len(sc.generators) == 2
    assert sc.grade == Grade(1, 5, 5, 1)
    assert sc.option("force", False) is True
    assert sc.option("margin", 0) == 5
    for text in sc.generators:
        f = parse_polynomial(text, sc.grade)
        degrees = {idx.outer + sum(idx.inner) for idx in f.coeffs}
        assert len(degrees) == 1  # homogeneous
        assert degrees.pop() in {1, 2, 3}


def test_named_corpus_labels():
    labels = [sc.label for sc in named_corpus()]
    assert labels == ["one", "z", "z1", "z-minus-z1", "z2-minus-zz1", "pair-n2"]
    by_label = {sc.label: sc for sc in named_corpus()}
    assert by_label["pair-n2"].grade.n == 2
    assert by_label["pair-n2"].generators == ("z - z1", "z - z2")
    for sc in named_corpus():
        assert sc.option("force", False) is True


def test_builtin_corpus_size():
    corpus = builtin_corpus(random_count=20)
    assert len(corpus) == 26
    labels = [sc.label for sc in corpus]
    assert len(set(labels)) == 26
    assert sum(1 for lb in labels if lb.startswith("random-")) == 20
