import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crnormal import io
from crnormal.cli import main
from crnormal.errors import ValidationError
from crnormal.hypersurface import apply_map, invert, quadric, r_automorphism
from crnormal.normalform import PRESETS, LineChoice, custom_spec, preset
from crnormal.series import PuSeries

from helpers import random_fg_map, random_jet


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(io.dumps(doc))
    return str(p)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


# documents -------------------------------------------------------------------


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_jet_and_map_round_trip(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    sig = [rng.choice([1, -1]) for _ in range(n)]
    jet = random_jet(rng, n, 6, sig)
    assert io.jet_from_doc(io.loads(io.dumps(io.jet_to_doc(jet)))) == jet
    h = random_fg_map(rng, n, 6)
    assert io.map_from_doc(io.loads(io.dumps(io.map_to_doc(h)))) == h


def test_spec_round_trip():
    for tag in PRESETS:
        spec = preset(tag, 8)
        assert io.spec_from_doc(io.spec_to_doc(spec)) == spec
    custom = custom_spec([LineChoice(2, 3, (3, 0)), LineChoice(1, 2, (2, 1, 0))], 8, base="nf1")
    assert io.spec_from_doc(io.loads(io.dumps(io.spec_to_doc(custom)))).choices == custom.choices


def test_spec_document_forms():
    doc = {"custom": [{"kind": "k>=2", "k": 2, "l": 3, "m": 1, "mp": 0}], "base": "chern-moser"}
    spec = io.spec_from_doc(doc, 8)
    assert spec.choice(2, 3).indices == (1, 0)
    with pytest.raises(ValidationError):
        io.spec_from_doc({"custom": [{"kind": "k=1", "k": 2, "l": 3, "m": 1, "mp": 0}]}, 8)
    with pytest.raises(ValidationError):
        io.spec_from_doc({"custom": [{"kind": "k>=2", "k": 2, "l": 3, "m": 1, "mp": 0}]}, 8)  # not total
    with pytest.raises(io.DocumentError):
        io.spec_from_doc({"custom": [{"kind": "k>=2", "k": 2, "l": 3, "m": 1}]}, 8)


def test_output_is_deterministic():
    rng = random.Random(1)
    jet = random_jet(rng, 2, 6, [1, -1])
    a = io.dumps(io.jet_to_doc(jet))
    shuffled = io.jet_to_doc(jet)
    shuffled["terms"].reverse()
    assert io.dumps(io.jet_to_doc(io.jet_from_doc(shuffled))) == a
    json.loads(a)


def test_document_errors():
    with pytest.raises(io.DocumentError):
        io.loads("{")
    with pytest.raises(io.DocumentError):
        io.jet_from_doc({"n": 1, "eps": [1], "terms": []})
    with pytest.raises(ValidationError):
        io.jet_from_doc({"n": 1, "eps": [1], "max_weight": 4, "terms": []})  # no Levi form
    doc = io.jet_to_doc(quadric([1], 4))
    doc["terms"].append({"z": [5], "zbar": [0], "u": 0, "coeff": "1"})
    with pytest.raises(ValidationError):
        io.jet_from_doc(doc)


# commands --------------------------------------------------------------------


def test_normalize_quadric_all_presets(tmp_path, capsys):
    q = write(tmp_path, "q.json", io.jet_to_doc(quadric([1, -1], 6)))
    outputs = set()
    for tag in PRESETS:
        nf, mp = str(tmp_path / f"nf-{tag}.json"), str(tmp_path / f"map-{tag}.json")
        code, _, err = run(["normalize", q, "--spec", tag.replace("_", "-"), "--out-nf", nf, "--out-map", mp], capsys)
        assert code == 0 and "0 violations" in err
        assert io.jet_from_doc(io.loads(open(nf).read())) == quadric([1, -1], 6)
        assert io.map_from_doc(io.loads(open(mp).read())).is_identity()
        outputs.add(open(nf).read())
    assert len(outputs) == 1


def test_malformed_coefficient_exit_3(tmp_path, capsys):
    doc = io.jet_to_doc(quadric([1], 4))
    doc["terms"][0]["coeff"] = "1//2"
    path = write(tmp_path, "bad.json", doc)
    code, _, err = run(["normalize", path], capsys)
    assert code == 3 and "column 2" in err


def test_bad_json_exit_3(tmp_path, capsys):
    p = tmp_path / "x.json"
    p.write_text("{\"n\": 1,")
    code, _, err = run(["check", str(p)], capsys)
    assert code == 3 and "line 1" in err


def test_validation_exit_1(tmp_path, capsys):
    doc = io.jet_to_doc(quadric([1], 4))
    doc["terms"][0]["coeff"] = "2"
    code, _, err = run(["check", write(tmp_path, "j.json", doc)], capsys)
    assert code == 1 and "Levi" in err
    code, _, _ = run(["check", str(tmp_path / "missing.json")], capsys)
    assert code == 1


def test_check_command(tmp_path, capsys):
    q = quadric([1], 6)
    code, out, _ = run(["check", write(tmp_path, "q.json", io.jet_to_doc(q))], capsys)
    assert code == 0 and "0 violation" in out
    z, zb = PuSeries.z(1, 6, 0), PuSeries.zbar(1, 6, 0)
    bad = q.with_phi(q.phi + z**3 + zb**3)
    code, out, _ = run(["check", write(tmp_path, "b.json", io.jet_to_doc(bad))], capsys)
    assert code != 0 and "phi_{3,0,0}" in out


def test_normalize_then_check(tmp_path, capsys):
    jet = random_jet(random.Random(3), 2, 6, [1, -1])
    src = write(tmp_path, "m.json", io.jet_to_doc(jet))
    nf = str(tmp_path / "nf.json")
    code, _, _ = run(["normalize", src, "--spec", "min-l", "--out-nf", nf, "--oracle"], capsys)
    assert code == 0
    code, _, _ = run(["check", nf, "--spec", "min-l"], capsys)
    assert code == 0


def test_normalize_stdout_and_max_weight(tmp_path, capsys, monkeypatch):
    jet = random_jet(random.Random(4), 1, 7, [1])
    src = write(tmp_path, "m.json", io.jet_to_doc(jet))
    code, out, _ = run(["normalize", src, "--max-weight", "5"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["normal_form"]["max_weight"] == 5 and doc["map"]["max_weight"] == 5
    code, _, _ = run(["normalize", src, "--max-weight", "9"], capsys)
    assert code == 1


def test_apply_command(tmp_path, capsys):
    q = quadric([1, -1], 6)
    qp = write(tmp_path, "q.json", io.jet_to_doc(q))
    r = write(tmp_path, "r.json", io.map_to_doc(r_automorphism(2, 5, 6)))
    code, out, err = run(["apply", qp, r, "--verify"], capsys)
    assert code == 0 and "holds" in err
    assert io.jet_from_doc(json.loads(out)) == q
    ident = write(tmp_path, "id.json", io.map_to_doc(invert(r_automorphism(2, 0, 6))))
    code, out, _ = run(["apply", qp, ident], capsys)
    assert io.jet_from_doc(json.loads(out)) == q


def test_apply_round_trip_with_inverse(tmp_path, capsys):
    rng = random.Random(6)
    jet = random_jet(rng, 2, 5, [1, 1])
    h = random_fg_map(rng, 2, 5)
    src = write(tmp_path, "m.json", io.jet_to_doc(jet))
    img = str(tmp_path / "img.json")
    assert run(["apply", src, write(tmp_path, "h.json", io.map_to_doc(h)), "--out", img], capsys)[0] == 0
    assert io.jet_from_doc(io.loads(open(img).read())) == apply_map(jet, h)
    code, out, _ = run(["apply", img, write(tmp_path, "hi.json", io.map_to_doc(invert(h))), "--verify"], capsys)
    assert code == 0 and io.jet_from_doc(json.loads(out)) == jet


def test_decompose_command(tmp_path, capsys):
    levi = io.poly_to_doc(PuSeries.levi_form([1, -1], 4), [1, -1])
    code, out, _ = run(["decompose", write(tmp_path, "p.json", levi), "1", "--verify"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["q"]["terms"] == [{"z": [0, 0], "zbar": [0, 0], "u": 0, "coeff": "1"}] and doc["r"]["terms"] == []
    z2 = io.poly_to_doc(PuSeries.z(1, 4, 0) ** 2)
    code, out, _ = run(["decompose", write(tmp_path, "z.json", z2), "1", "--eps", "1"], capsys)
    assert code == 0 and json.loads(out)["q"]["terms"] == []
    code, _, err = run(["decompose", write(tmp_path, "z2.json", z2), "1"], capsys)
    assert code == 1 and "eps" in err


def test_decompose_random_round_trip(tmp_path, capsys):
    from helpers import random_bihomogeneous

    p = random_bihomogeneous(random.Random(2), 2, 3, 3, 6, density=0.7)
    src = write(tmp_path, "p.json", io.poly_to_doc(p, [1, -1]))
    code, out, _ = run(["decompose", src, "2", "--verify"], capsys)
    doc = json.loads(out)
    q, r = io.poly_from_doc(doc["q"]), io.poly_from_doc(doc["r"])
    assert code == 0 and q * PuSeries.levi_form([1, -1], 6) ** 2 + r == p


def test_spec_validate(tmp_path, capsys):
    code, out, _ = run(["spec", "validate", "mixed", "--max-weight", "10"], capsys)
    assert code == 0 and "67 conditions" in out
    good = write(tmp_path, "s.json", {"custom": [{"kind": "k=1", "k": 1, "l": 2, "m": 2, "mp": 0, "mpp": 1}], "base": "nf1"})
    assert run(["spec", "validate", good, "--max-weight", "8"], capsys)[0] == 0
    bad = write(tmp_path, "b.json", {"custom": [{"kind": "k=1", "k": 1, "l": 3, "m": 1, "mp": 3, "mpp": 0}], "base": "nf1"})
    code, _, err = run(["spec", "validate", bad], capsys)
    assert code == 1 and "inadmissible" in err
    assert run(["spec", "validate", write(tmp_path, "p.json", {"preset": "bogus"})], capsys)[0] == 1


def test_stdin_input(monkeypatch, capsys):
    import io as stdio

    monkeypatch.setattr("sys.stdin", stdio.StringIO(io.dumps(io.jet_to_doc(quadric([1], 4)))))
    code, out, _ = run(["check", "-"], capsys)
    assert code == 0


def test_oracle_mismatch_exit_2(tmp_path, capsys, monkeypatch):
    import crnormal.cli as cli
    from crnormal.solver import normalize as real

    def broken(jet, spec):
        res = real(jet, spec)
        res.map = r_automorphism(jet.n, 1, jet.max_weight)
        return res

    monkeypatch.setattr(cli, "normalize_oracle", broken)
    jet = random_jet(random.Random(1), 1, 5, [1])
    code, _, err = run(["normalize", write(tmp_path, "m.json", io.jet_to_doc(jet)), "--oracle"], capsys)
    assert code == 2 and "disagree" in err
