"""The example corpus: completeness, determinism, round-trips."""

import json

from jetideals.corpus import case_by_id, corpus_cases, run_case
from jetideals.jetring import RingSignature, jet_parse


def test_at_least_ten_cases_with_references():
    cases = corpus_cases()
    assert len(cases) >= 10
    for c in cases:
        assert c.id and c.description and c.reference
        assert c.tag in ("definition", "analytic", "derived")


def test_required_case_present():
    assert case_by_id("ex4-negligible").inputs["F"] == "y^3/z"


def test_corpus_jets_roundtrip():
    for case in corpus_cases():
        ins = case.inputs
        if "m" not in ins or "n" not in ins:
            continue
        sig = RingSignature(ins["m"], ins["n"])
        texts = list(ins.get("generators", []))
        for key in ("p", "target"):
            if key in ins:
                texts.append(ins[key])
        texts.extend(ins.get("Q", []))
        for t in ins.get("terms", []):
            texts.append(t["Q"])
        for text in texts:
            p = jet_parse(text, sig)
            assert jet_parse(str(p), sig) == p


def test_every_case_passes_and_is_deterministic():
    for case in corpus_cases():
        first = json.dumps(run_case(case), sort_keys=True, default=str)
        second = json.dumps(run_case(case), sort_keys=True, default=str)
        assert json.loads(first)["verdict"] == "pass", case.id
        assert first == second, f"{case.id} is not deterministic"
