from __future__ import annotations

import pytest

import polyhardy as ph
from polyhardy.scenarios import builtin_corpus


@pytest.fixture(scope="session")
def g1() -> ph.Grade:
    return ph.Grade(1, 5, 5, 1)


@pytest.fixture(scope="session")
def corpus_artifacts() -> dict[str, dict]:
    """Orbit, wandering, and extracted symbols for every bundled scenario."""
    out: dict[str, dict] = {}
    for scenario in builtin_corpus(random_count=20):
        grade = scenario.grade
        generators = [ph.parse_polynomial(t, grade) for t in scenario.generators]
        s = ph.orbit_span(generators, grade, int(scenario.option("margin", 2)))
        w = ph.wandering_subspace(s)
        theta = ph.extract_theta(s, w, force=True)
        phis = [ph.extract_phi(s, w, axis, force=True) for axis in range(grade.n)]
        out[scenario.label] = {
            "scenario": scenario,
            "grade": grade,
            "generators": generators,
            "s": s,
            "w": w,
            "theta": theta,
            "phis": phis,
        }
    return out
