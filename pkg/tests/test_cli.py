import json
import subprocess
import sys

import numpy as np
import pytest

from stablemech import cli
from stablemech import renorm_sampling as rs


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def result(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    doc = json.loads(out)
    assert doc["provenance"]["tool"] == "stablemech"
    return doc["result"]


def test_indexes_classical(capsys):
    res = result(capsys, "indexes", "--alpha1", "2", "--alpha2", "4/3", "--dim", "inf")
    assert (res["alpha"], res["beta"], res["gamma"], res["epsilon"], res["delta"]) == ("0", "1/2", "1", "0", "3")
    assert res["zeta"] == "-inf" and res["exact"] is True


def test_indexes_preset(capsys):
    res = result(capsys, "indexes", "--preset", "experimental")
    assert res["exact"] is False and "not derived" in res["label"]


def test_stability_check(capsys):
    res = result(capsys, "stability-check", "--alpha", "1.5", "--beta", "0", "--n", "5",
                 "--N", "100000", "--seed", "7")
    row = res["values"][0]
    assert row["below"] and row["ks"] < row["critical"]


def test_stability_external_uniform(capsys, tmp_path):
    p = tmp_path / "u.txt"
    rs.write_samples(p, np.random.default_rng(0).uniform(-1, 1, 300_000), "text")
    res = result(capsys, "stability-check", "--samples", str(p), "--text", "--alpha", "2", "--n", "2")
    assert not res["values"][0]["below"]


def test_density_normal(capsys):
    res = result(capsys, "density", "--alpha", "2", "--x", "0")
    assert res["values"][0]["density"] == pytest.approx(0.28209479, abs=1e-8)


def test_density_csv(capsys):
    code, out, _ = run(capsys, "density", "--alpha", "1", "--x=-1:1:3", "--format", "csv")
    assert code == 0
    body = [l for l in out.splitlines() if not l.startswith("#")]
    assert body[0] == "x,density" and len(body) == 4
    assert "\r" not in out


def test_mellin(capsys):
    res = result(capsys, "mellin", "--alpha", "1", "--rho", "1/2", "--s", "1.5", "--meijer", "1,2,1")
    assert res["values"][0]["M_re"] == pytest.approx(2 ** -0.5, rel=1e-12)
    assert res["fox_h"]["orders"] == [1, 1, 2, 2]
    assert res["meijer_g"]["orders"] == [0, 0, 1, 0]
    code, _, err = run(capsys, "mellin", "--alpha", "2", "--meijer", "4,2,1")
    assert code == 1 and json.loads(err)["error"] == "NotCoprime"


def test_cf_canonical(capsys):
    res = result(capsys, "cf", "--alpha", "1.3", "--beta", "0.4", "--y=-1,0.5,2", "--canonical")
    for row in res["values"]:
        assert row["re"] == pytest.approx(row["canonical_re"], abs=1e-6)
        assert row["im"] == pytest.approx(row["canonical_im"], abs=1e-6)


def test_lnz(capsys):
    res = result(capsys, "lnz", "--alpha", "0.5", "--beta", "1", "--v", "0.5,1", "--order", "1")
    assert res["transition"] == "first-order"
    assert res["exponent"] == pytest.approx(-0.5, abs=0.05)


def test_attraction_and_norm(capsys):
    res = result(capsys, "attraction", "--model", "pareto", "--tail-alpha", "1.5", "--alpha", "1.5")
    assert res["attracted"] and res["c_ratio"] == 0.0
    res = result(capsys, "attraction", "--model", "gaussian", "--alpha", "1.5")
    assert not res["attracted"]
    res = result(capsys, "norm-constants", "--model", "pareto", "--tail-alpha", "0.5",
                 "--alpha", "0.5", "--n", "3,10")
    assert [r["A_n"] for r in res["values"]] == pytest.approx([9.0, 100.0], rel=1e-12)


def test_ising_exponents(capsys):
    res = result(capsys, "ising", "--t", "0.1", "--h", "0", "--exponents")
    assert res["beta"] == pytest.approx(0.125, abs=0.02)
    assert 1 / res["one_over_delta"] == pytest.approx(15, rel=0.05)
    assert res["C_over_log"]["max"] / res["C_over_log"]["min"] < 1.05


def test_phi_grid_marks_origin(capsys):
    code, out, _ = run(capsys, "phi-grid", "--t", "0", "--h", "0", "--format", "csv")
    assert code == 0 and "nan" in out.splitlines()[-1]


def test_b_of_t(capsys):
    res = result(capsys, "b-of-t", "--alpha1", "2", "--alpha2", "4/3", "--d", "1,1",
                 "--t", "1,4", "--check", "--strictify")
    assert res["values"][0]["b1"] == 0.0
    assert res["strict_shift"] == pytest.approx([2.0, 4.0])
    assert all(r["quad_err"] < 1e-10 for r in res["values"])


def test_spectrum(capsys):
    res = result(capsys, "spectrum", "--alpha1", "2", "--alpha2", "4/3")
    assert res["valid"] and res["moment_cutoff"] == pytest.approx(4 / 3)
    res = result(capsys, "spectrum", "--alpha1", "2", "--alpha2", "2")
    assert res["moment_cutoff"] == "inf"
    code, out, _ = run(capsys, "spectrum", "--format", "csv")
    assert code == 1


def test_sample_files(capsys, tmp_path):
    p = tmp_path / "s.bin"
    res = result(capsys, "sample", "--alpha", "1.2", "--n", "1000", "--seed", "4", "--samples-out", str(p))
    assert res["n"] == 1000 and len(p.read_bytes()) == 8 + 8000
    assert np.array_equal(rs.read_samples(p), rs.sample(cli._law(cli.build_parser().parse_args(
        ["sample", "--alpha", "1.2", "--n", "1"])), 1000, seed=4).values)


def test_byte_identical_outputs(tmp_path):
    argv = ["sample", "--alpha", "0.8", "--beta", "0.3", "--n", "500", "--seed", "11", "--format", "csv"]
    outs = []
    for k in range(2):
        target = tmp_path / f"o{k}.csv"
        assert cli.main(argv + ["--out", str(target)]) == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]
    assert cli.main(argv[:-4] + ["--seed", "12", "--format", "csv", "--out", str(tmp_path / "o2.csv")]) == 0
    assert (tmp_path / "o2.csv").read_bytes() != outs[0]


def test_atomic_out_leaves_no_temp(tmp_path):
    target = tmp_path / "r.json"
    assert cli.main(["indexes", "--preset", "ising", "--out", str(target)]) == 0
    assert [p.name for p in tmp_path.iterdir()] == ["r.json"]
    json.loads(target.read_text())


def test_usage_error(capsys):
    code, _, err = run(capsys, "indexes")
    assert code == 2 and json.loads(err)["exit_code"] == 2
    code, _, err = run(capsys, "nonsense")
    assert code == 2


def test_numerical_error_exit(capsys):
    code, _, err = run(capsys, "indexes", "--alpha1", "2", "--alpha2", "1")
    doc = json.loads(err)
    assert code == 1 and doc["error"] == "DeltaPole"


def test_provenance_hash_tracks_config(capsys):
    a = json.loads(run(capsys, "indexes", "--preset", "ising")[1])["provenance"]["config_sha256"]
    b = json.loads(run(capsys, "indexes", "--preset", "classical")[1])["provenance"]["config_sha256"]
    assert a != b


@pytest.mark.parametrize("name", sorted(cli.COMMANDS))
def test_help_states_formula(name, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main([name, "--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    formula = cli.COMMANDS[name][2]
    assert "Implements:" in out
    assert formula.split()[0] in out and "=" in formula


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "stablemech", "indexes", "--preset", "d3-rational"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["result"]["delta"] == "5"
