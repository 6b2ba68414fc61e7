import json
import math

import numpy as np
import pytest

from bargmann import catalog, core
from bargmann.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def doc_of(capsys, *argv):
    code, out = run(capsys, *argv)
    assert code == 0, out
    return json.loads(out)


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def test_triple(capsys):
    d = doc_of(capsys, "triple", "squeezed_vacuum", "--params", "r=0.8")
    t = core.from_dict(d)
    assert t.A[0, 0] == pytest.approx(-math.tanh(0.8))
    assert d["schema_version"] == "1"


def test_triple_output_parses_bitwise(capsys, tmp_path):
    code, out = run(capsys, "triple", "two_mode_squeezed_vacuum", "--params", "r=0.3")
    ref = catalog.two_mode_squeezed_vacuum(0.3)
    t = core.loads(out)
    assert np.array_equal(t.A, ref.A) and t.c == ref.c


def test_check_exit_codes(capsys, tmp_path):
    loss = write(tmp_path, "loss.json", core.dumps(catalog.loss(0.4)))
    code, out = run(capsys, "check", "--triple", loss, "--as", "channel")
    d = json.loads(out)
    assert code == 0 and d["cp"] is True and d["tp"] is True and d["ok"] is True
    bad = core.AbcTriple(np.array([[0, 1.0], [1.0, 0]]), [0, 0], 1.0, catalog.thermal(0.1).layout)
    p = write(tmp_path, "bad.json", core.dumps(bad))
    code, out = run(capsys, "check", "--triple", p, "--as", "dm")
    assert code == 1 and json.loads(out)["ok"] is False


def test_contract_apply(capsys, tmp_path):
    L = write(tmp_path, "l.json", core.dumps(catalog.loss(0.5)))
    R = write(tmp_path, "r.json", core.dumps(core.outer(catalog.coherent(0.4))))
    t = core.from_dict(doc_of(capsys, "contract", "--left", L, "--right", R, "--apply"))
    ref = core.outer(catalog.coherent(0.4 * math.sqrt(0.5)))
    assert np.allclose(core.reorder(t, ref.layout).b, ref.b)


def test_convert_round_trip(capsys, tmp_path):
    cov = {"schema_version": "1", "sigma": [[1.5, 0.2], [0.2, 1.2]], "mu": [0.1, -0.3], "hbar": 2.0}
    p = write(tmp_path, "cov.json", cov)
    abc = doc_of(capsys, "convert", "--from", "cov", "--to", "abc", "--input", p)
    q = write(tmp_path, "abc.json", abc)
    back = doc_of(capsys, "convert", "--from", "abc", "--to", "cov", "--input", q)
    assert np.allclose(back["sigma"], cov["sigma"], atol=1e-12)
    assert np.allclose(back["mu"], cov["mu"], atol=1e-12)


def test_herald_tmsv_vacuum(capsys, tmp_path):
    circ = {"schema_version": "1", "n_modes": 2, "ops": [{"gate": "two_mode_squeezer", "modes": [0, 1], "params": {"r": 0.7}}]}
    p = write(tmp_path, "c.json", circ)
    d = doc_of(capsys, "herald", "--circuit", p, "--pattern", "0")
    assert d["exact"] is True and d["measured_modes"] == [1]
    assert d["core"]["shape"] == [1]
    assert d["probability"] == pytest.approx(1 / math.cosh(0.7) ** 2)


def test_decompose_and_effsq(capsys, tmp_path):
    p = write(tmp_path, "k.json", core.dumps(catalog.two_mode_squeezed_vacuum(0.5)))
    d = doc_of(capsys, "decompose", "pure", "--triple", p, "--m", "1")
    assert d["kind"] == "pure" and d["feasible"] is True
    d = doc_of(capsys, "decompose", "formal", "--triple", p, "--m", "1")
    assert d["kind"] == "formal"
    s = write(tmp_path, "s.json", core.dumps(catalog.squeezed_vacuum(0.4, math.pi)))
    d = doc_of(capsys, "effsq", "--triple", s)
    assert d["sigma_p2"] == pytest.approx(math.exp(-0.8))


def test_gkp_bound_json_and_csv(capsys):
    d = doc_of(capsys, "gkp-bound", "--staircase", "15,15;0.4", "--loss", "0.05")
    assert d["status"] == "optimal" and d["gap"] <= 1e-7
    code, out = run(capsys, "gkp-bound", "--staircase", "15,15;0.4", "--loss-sweep", "0.01:0.05:3", "--out", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0].startswith("eta,") and len(lines) == 4


def test_error_exit_codes(capsys, tmp_path):
    p = write(tmp_path, "broken.json", "{not json")
    assert run(capsys, "check", "--triple", p, "--as", "dm")[0] == 1
    d = core.to_dict(catalog.vacuum())
    d["schema_version"] = "7"
    q = write(tmp_path, "v7.json", d)
    assert run(capsys, "check", "--triple", q, "--as", "ket")[0] == 1
    assert main(["frobnicate"]) == 2
    ok = write(tmp_path, "vac.json", core.dumps(catalog.vacuum()))
    assert main(["contract", "--left", ok, "--right", ok]) == 2
