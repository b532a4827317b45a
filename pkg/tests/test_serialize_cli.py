from __future__ import annotations

import json

import pytest

from ffdescent.cli import main
from ffdescent.experiments import ConfigError, demo_config, load_config, run
from ffdescent.indivisibility import build_polynomial_example, idempotent_example, tensor_lift
from ffdescent.modules import IndexSet, psi_map
from ffdescent.rings import PBoolPoly
from ffdescent.serialize import (
    FormatError,
    linmap_from_dict,
    linmap_to_dict,
    save_witness,
    spec_from_dict,
    spec_to_dict,
    verify_witness_data,
    verify_witness_file,
    witness_from_dict,
    witness_to_dict,
)
from ffdescent.splitting import ObstructionDiagram, solve_obstruction


@pytest.fixture
def witness():
    return solve_obstruction(ObstructionDiagram(tensor_lift(idempotent_example(3, 2), 2).spec), seed=5)


def test_spec_round_trip():
    for spec in (idempotent_example(2, 3), tensor_lift(idempotent_example(2, 2), 2).spec,
                 build_polynomial_example(3, 2, 2)):
        assert spec_from_dict(json.loads(json.dumps(spec_to_dict(spec)))) == spec


def test_linmap_round_trip():
    R = PBoolPoly(3, 2)
    f = psi_map(R, IndexSet(["a", "b"]), {"a": R.variable(1), "b": R.variable(2) ** 2})
    assert linmap_from_dict(json.loads(json.dumps(linmap_to_dict(f)))) == f
    with pytest.raises(FormatError):
        linmap_from_dict({**linmap_to_dict(f), "version": 99})


def test_witness_round_trip(witness):
    data = json.loads(json.dumps(witness_to_dict(witness)))
    again = witness_from_dict(data)
    assert again.rows == witness.rows
    check = verify_witness_data(data)
    assert check.ok and check.digest_ok


def test_corrupted_coefficient_is_located(witness):
    data = json.loads(json.dumps(witness_to_dict(witness)))
    part, entry = ("f", data["f"][0]) if data["f"] else ("g", data["g"][0])
    entry[2][0][1][0] = (entry[2][0][1][0] + 1) % 3
    check = verify_witness_data(data)
    assert not check.ok and not check.digest_ok
    assert any("t = " in msg for msg in check.problems)


def test_stale_digest_alone_is_reported(witness):
    data = witness_to_dict(witness)
    data["digest"] = "0" * 64
    check = verify_witness_data(data)
    assert not check.ok and check.problems == ["digest: stored digest does not match the contents"]


def test_file_errors(tmp_path, witness):
    empty = tmp_path / "empty.json"
    empty.write_text("")
    with pytest.raises(FormatError):
        verify_witness_file(empty)
    broken = tmp_path / "broken.json"
    broken.write_text('{"format":\n  oops}')
    with pytest.raises(FormatError, match="line 2"):
        verify_witness_file(broken)
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({**witness_to_dict(witness), "version": 2}))
    with pytest.raises(FormatError, match="version"):
        verify_witness_file(wrong)


def test_cli_verify(tmp_path, witness, capsys):
    path = tmp_path / "w.json"
    save_witness(witness, path)
    assert main(["verify", str(path)]) == 0
    data = json.loads(path.read_text())
    data["g"][0][2][0][1][0] = (data["g"][0][2][0][1][0] + 1) % 3
    path.write_text(json.dumps(data))
    assert main(["verify", str(path)]) == 1
    (tmp_path / "e.json").write_text("")
    assert main(["verify", str(tmp_path / "e.json")]) == 2


def test_config_errors_name_the_line():
    with pytest.raises(ConfigError, match=r"<config>:3: unknown key 'bogus'"):
        load_config("experiment: E3\nseed: 1\nbogus: 2\n")
    with pytest.raises(ConfigError, match="needs an explicit seed"):
        load_config("experiment: E2\n")
    with pytest.raises(ConfigError, match=r":2: k must be int"):
        load_config("experiment: E3\nk: many\nseed: 1\n")
    with pytest.raises(ConfigError, match=r":1: experiment must be"):
        load_config("experiment: E9\n")
    with pytest.raises(ConfigError, match=r"<config>:3: .*flow sequence at line 2"):
        load_config("experiment: E1\nprimes: [2, 3\n")
    with pytest.raises(ConfigError, match="sizes"):
        load_config("experiment: E3\nseed: 0\nn: 2\nsizes: [[2, 3, 4]]\n")


def test_defaults_are_echoed():
    report = run(load_config("experiment: E5\nseed: 0\nm_max: 1\nn_max: 1\npoly_q: [2]\npoly_n_max: 1\n"))
    csv = report.to_csv()
    assert "# config m_max = 1" in csv and "# config primes = [2, 3]" in csv
    assert csv.startswith("# schema ffdescent-report/1")


def test_e3_threshold_cell():
    cfg = load_config("experiment: E3\nseed: 0\nn: 2\nk: 1\nsizes: [[2, 3]]\ninstances: 100\n")
    report = run(cfg)
    row = next(r for r in report.rows if r["case"].startswith("n=2 k=1"))
    assert row["value"] == 100 and row["threshold"] and report.all_match


def test_e1_with_ring_descriptor():
    cfg = load_config("experiment: E1\nring: {kind: product_fp, p: 2, m: 4}\nlifts: []\npoly_q: []\nprimes: []\n")
    first, second = run(cfg), run(cfg)
    assert first.all_match and first.rows[0]["case"] == "idempotent p=2 m=4"
    assert first.rows == second.rows


@pytest.mark.parametrize("exp", ["E1", "E2", "E3", "E4", "E5"])
def test_demo_reports_are_deterministic(exp):
    a, b = run(demo_config(exp)), run(demo_config(exp))
    assert a.all_match
    assert a.to_csv() == b.to_csv()


def test_cli_run_writes_csv(tmp_path, capsys):
    cfg = tmp_path / "e2.yaml"
    wdir = tmp_path / "wit"
    cfg.write_text(f"experiment: E2\nseed: 3\nseeds: 2\nsizes: [2]\nprimes: [2]\nwitness_dir: {wdir}\n"
                   f"output:\n  csv: {tmp_path / 'out.csv'}\n")
    assert main(["run", str(cfg)]) == 0
    text = (tmp_path / "out.csv").read_text()
    assert text.splitlines()[-1].startswith("# wall-clock")
    files = sorted(wdir.iterdir())
    assert files and all(main(["verify", str(f)]) == 0 for f in files)
    assert "E2:" in capsys.readouterr().out


def test_cli_bad_config(tmp_path, capsys):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("experiment: E4\nfp_dims: 3\n")
    assert main(["run", str(cfg)]) == 2
    assert "bad.yaml:2" in capsys.readouterr().err
