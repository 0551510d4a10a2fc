import csv
import json
import math

import numpy as np
import pytest

from nilqes.cli import arctan_samples, main


@pytest.fixture(autouse=True)
def fixed_epoch(monkeypatch):
    monkeypatch.delenv("SOURCE_DATE_EPOCH", raising=False)
    monkeypatch.delenv("QES_TOL", raising=False)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, [json.loads(ln) for ln in out.out.splitlines() if ln.strip()], out.err


def solve_to_file(capsys, tmp_path, name, *argv):
    code = main(["solve", *argv])
    text = capsys.readouterr().out
    path = tmp_path / name
    path.write_text(text)
    return code, path


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["y", "value"]
    data = np.array(rows[1:], float)
    return data[:, 0], data[:, 1]


def test_solve_auto_beta(capsys):
    code, recs, _ = run(capsys, "solve", "--n", "4", "--m", "1", "--beta", "6,2,-0.2,auto")
    assert code == 0 and len(recs) == 1
    r = recs[0]
    assert r["schema_version"] == "qes-record/1"
    assert r["solution"]["E"] == pytest.approx(-0.711111111111111, abs=1e-12)
    assert r["problem"]["casimirs"][2] == 0.0
    assert r["solution"]["node_count"] == 1
    assert r["problem"]["alpha"] == pytest.approx(-5 / 3)


def test_solve_fixed_betas_M0(capsys):
    code, recs, _ = run(capsys, "solve", "--n", "4", "--m", "0", "--beta", "6,2,-0.2,0.3")
    assert code == 0 and [r["solution"]["E"] for r in recs] == [0.0]


def test_solve_casimirs_decatic(capsys):
    code, recs, _ = run(capsys, "solve", "--n", "6", "--m", "5", "--casimir", "1,-1", "--beta2", "0")
    assert code == 0
    assert [r["solution"]["E"] for r in recs] == [pytest.approx(2.0)]


def test_solve_no_solution_exit_2(capsys):
    code, recs, err = run(capsys, "solve", "--n", "4", "--m", "1", "--beta", "6,2,-0.2,0.3")
    assert code == 2 and recs == []


def test_solve_zero_energy(capsys):
    code, recs, _ = run(capsys, "solve", "--n", "5", "--m", "6", "--zero-energy")
    assert code == 0
    assert recs[0]["problem"]["symmetrized"] and recs[0]["problem"]["parity"] == "odd"
    code, recs, err = run(capsys, "solve", "--n", "4", "--m", "2", "--zero-energy")
    assert code == 3 and "kN or kN+1" in err


def test_solve_symmetrized(capsys):
    code, recs, _ = run(capsys, "solve", "--n", "4", "--m", "2", "--symmetrized", "--beta", "auto,auto,auto,0.5")
    assert code == 0
    assert [(r["problem"]["parity"], r["solution"]["node_count"]) for r in recs] == [("even", 0), ("odd", 1)]
    assert [r["solution"]["E"] for r in recs] == [pytest.approx(-10 / 9), pytest.approx(14 / 9)]


def test_solve_bad_auto_position(capsys):
    code, _, err = run(capsys, "solve", "--n", "4", "--m", "1", "--beta", "6,auto,-0.2,0.1")
    assert code == 2 and "trailing" in err


def test_solve_check_attaches_oracle(capsys):
    code, recs, _ = run(capsys, "solve", "--n", "4", "--m", "2", "--beta", "6,2,-0.2,auto", "--check")
    assert code == 0
    for r in recs:
        assert r["oracle"]["delta"] < 1e-3
        assert r["oracle"]["matched_index"] == r["solution"]["node_count"]


def test_records_are_byte_stable(capsys):
    argv = ["solve", "--n", "4", "--m", "4", "--beta", "6,2,-0.2,auto"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_seeds_file(capsys, tmp_path):
    seeds = tmp_path / "seeds.json"
    seeds.write_text(json.dumps([[-1.9, 2.5], [-1.9, -2.5]]))
    code, recs, _ = run(capsys, "solve", "--n", "4", "--m", "4", "--casimir", "1,-1", "--seeds", str(seeds))
    assert code == 0  # catalogued case ignores seeds


@pytest.mark.parametrize("argv", [
    ["--n", "4", "--m", "1", "--beta", "6,2,-0.2,auto"],
    ["--n", "4", "--m", "3", "--beta", "6,2,-0.2,auto"],
    ["--n", "6", "--m", "5", "--casimir", "0.5,-0.05"],
    ["--n", "4", "--m", "2", "--symmetrized", "--beta", "auto,auto,auto,-0.5"],
    ["--n", "3", "--m", "1", "--zero-energy"],
])
def test_solve_verify_round_trip(capsys, tmp_path, argv):
    code, path = solve_to_file(capsys, tmp_path, "rec.jsonl", *argv)
    assert code == 0
    code, reports, _ = run(capsys, "verify", "--record", str(path))
    assert code == 0
    assert all(r["ok"] and r["delta"] < 1e-3 for r in reports)


def test_verify_coarse_grid_reports_richardson(capsys, tmp_path):
    _, path = solve_to_file(capsys, tmp_path, "rec.jsonl", "--n", "4", "--m", "1", "--beta", "6,2,-0.2,auto")
    _, fine, _ = run(capsys, "verify", "--record", str(path))
    _, coarse, _ = run(capsys, "verify", "--record", str(path), "--grid-n", "500")
    assert coarse[0]["delta"] > fine[0]["delta"]
    assert 3.0 <= coarse[0]["richardson_ratio"] <= 5.0


def test_verify_tampered_record(capsys, tmp_path):
    _, path = solve_to_file(capsys, tmp_path, "rec.jsonl", "--n", "4", "--m", "1", "--beta", "6,2,-0.2,auto")
    rec = json.loads(path.read_text())
    rec["solution"]["E"] += 1e-3
    bad = tmp_path / "bad.jsonl"
    bad.write_text(json.dumps(rec) + "\n")
    code, reports, _ = run(capsys, "verify", "--record", str(bad))
    assert code == 1 and not reports[0]["ok"]


@pytest.mark.parametrize("content", [None, "not json\n", '{"schema_version": "other"}\n'])
def test_verify_unreadable(capsys, tmp_path, content):
    path = tmp_path / "rec.jsonl"
    if content is not None:
        path.write_text(content)
    code, _, err = run(capsys, "verify", "--record", str(path))
    assert code == 4 and err.startswith("error")


def test_plot_data_sextic_pair(capsys, tmp_path):
    _, path = solve_to_file(capsys, tmp_path, "rec.jsonl", "--n", "4", "--m", "2", "--beta", "6,2,-0.2,auto")
    out = tmp_path / "plot"
    code, _, _ = run(capsys, "plot-data", "--record", str(path), "--out", str(out))
    assert code == 0
    y, v = read_csv(out / "potential.csv")
    assert len(y) == 801 and y[0] > -math.pi / 2 and y[-1] < math.pi / 2
    assert np.allclose(np.diff(y), math.pi / 801)
    psis = sorted(out.glob("psi_*.csv"))
    assert len(psis) == 2
    nodes = []
    for p in psis:
        _, psi = read_csv(p)
        big = psi[np.abs(psi) > 1e-9 * np.abs(psi).max()]
        nodes.append(int(np.count_nonzero(np.signbit(big[1:]) != np.signbit(big[:-1]))))
    assert sorted(nodes) == [0, 2]


def test_plot_data_normalization(capsys, tmp_path):
    _, path = solve_to_file(capsys, tmp_path, "rec.jsonl", "--n", "4", "--m", "1", "--beta", "6,2,-0.2,auto")
    run(capsys, "plot-data", "--record", str(path), "--out", str(tmp_path / "one"))
    run(capsys, "plot-data", "--record", str(path), "--out", str(tmp_path / "ten"), "--normalize", "10")
    (f1,) = (tmp_path / "one").glob("psi_*.csv")
    (f10,) = (tmp_path / "ten").glob("psi_*.csv")
    y, v1 = read_csv(f1)
    _, v10 = read_csv(f10)
    assert np.allclose(v10, math.sqrt(10) * v1, rtol=1e-12)
    # the midpoint sum over the written samples is a consistency check on the scale
    assert np.sum(v10**2) * (math.pi / 801) == pytest.approx(10.0, rel=1e-3)


def _zero_energy_curve(capsys, tmp_path, N, M):
    d = tmp_path / f"z{N}_{M}"
    _, path = solve_to_file(capsys, tmp_path, f"z{N}_{M}.jsonl", "--n", str(N), "--m", str(M), "--zero-energy")
    assert run(capsys, "plot-data", "--record", str(path), "--out", str(d))[0] == 0
    (f,) = d.glob("psi_*.csv")
    return read_csv(f)


def test_zero_energy_curves_change_shape_with_N(capsys, tmp_path):
    plateau, seesaw = [], []
    for N in (2, 3, 4, 5, 6, 10):
        y, psi = _zero_energy_curve(capsys, tmp_path, N, 0)
        psi = psi * np.sign(psi[400])
        plateau.append(np.mean(psi > 0.9 * psi.max()))
        y, psi = _zero_energy_curve(capsys, tmp_path, N, 1)
        x = np.tan(y)
        inner = (np.abs(x) < 0.9) & (x != 0.0)
        shape = psi[inner] / x[inner]
        seesaw.append(np.ptp(shape) / np.abs(shape).max())
    # M=0 flattens towards a box, M=1 towards a straight line inside |x| < 1
    assert all(a < b for a, b in zip(plateau, plateau[1:]))
    assert all(a > b for a, b in zip(seesaw, seesaw[1:]))


def test_arctan_samples():
    y = arctan_samples()
    assert len(y) == 801 and y[400] == pytest.approx(0.0, abs=1e-15)


def test_em_constant_field(capsys):
    code, recs, _ = run(capsys, "em", "--n", "2", "--m", "0", "--beta", "1", "--pz", "2")
    assert code == 0
    r = recs[0]
    assert r["fields"]["constant_B"]
    assert all(b == [0.0, 0.0, 1.0] for b in r["fields"]["B"])
    assert r["script_E"] == pytest.approx(r["reduced"]["solution"]["E"] + 4)


def test_em_sextic(capsys):
    py = 0.14074074074074072
    code, recs, _ = run(capsys, "em", "--n", "4", "--m", "1", "--beta", "6,2,-0.2", "--py", str(py))
    assert code == 0
    r = recs[0]
    assert r["script_E"] == r["reduced"]["solution"]["E"]
    assert r["residual_3d"] < 1e-10
    code, recs, _ = run(capsys, "em", "--n", "4", "--m", "1", "--beta", "6,2,-0.2", "--py", "1.0")
    assert code == 2


def test_qes_tol_env(capsys, monkeypatch):
    monkeypatch.setenv("QES_TOL", "1e-30")
    code, _, _ = run(capsys, "solve", "--n", "4", "--m", "3", "--beta", "6,2,-0.2,auto")
    assert code == 2
