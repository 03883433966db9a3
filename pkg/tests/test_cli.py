import csv
import json
import os
import subprocess
import sys

from zzlab.cli import main


def run_cli(args, tmp_path, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run([sys.executable, "-m", "zzlab.cli"] + args,
                          capture_output=True, text=True, cwd=tmp_path, env=env)


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_enumerate_example(tmp_path):
    out = tmp_path / "en.csv"
    rc = main(["enumerate", "--q", "3", "--group", "2", "--d", "2",
               "--out", str(out)])
    assert rc == 0
    rows = read_csv(out)
    assert rows[0] == ["member_id", "conductor_degree", "surjective", "record"]
    assert len(rows) - 1 == 18
    meta = json.loads(out.with_suffix(".csv.meta.json").read_text())
    assert meta["n_members"] == 18 and meta["tool"] == "zzlab"


def test_count_series_matches_enumerate(tmp_path):
    out = tmp_path / "cs.csv"
    assert main(["count-series", "--q", "3", "--group", "2", "--dmax", "8",
                 "--out", str(out)]) == 0
    rows = read_csv(out)
    got = {int(r[0]): int(r[1]) for r in rows[1:]}
    assert got[0] == 2 and got[1] == 0 and got[2] == 18
    from zzlab import FamilySpec, FiniteField, GroupSpec, enumerate_members
    spec = FamilySpec(FiniteField(3), GroupSpec((2,)))
    for d in range(9):
        assert got[d] == len(enumerate_members(spec, d))


def test_validation_exit_code(tmp_path):
    # q = 5, exp(G) = 3: 5 != 1 mod 3, tameness hypothesis fails
    rc = main(["enumerate", "--q", "5", "--group", "3", "--d", "2",
               "--out", str(tmp_path / "x.csv")])
    assert rc == 2


def test_resource_exit_code(tmp_path, monkeypatch):
    monkeypatch.setenv("ZZLAB_BUDGET", "10")
    rc = main(["enumerate", "--q", "3", "--group", "2", "--d", "6",
               "--out", str(tmp_path / "x.csv")])
    assert rc == 3


def test_bs_check(tmp_path):
    out = tmp_path / "bs.csv"
    assert main(["bs-check", "--q", "3", "--bs-degree", "16", "--beta", "0.25",
                 "--grid", "2000", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 2
    assert float(rows[1][4]) <= 1e-10


def test_probe_lemma(tmp_path):
    out = tmp_path / "probe.csv"
    assert main(["probe-lemma", "--q", "3", "--group", "2", "--dmax", "6",
                 "--out", str(out)]) == 0
    rows = read_csv(out)
    kinds = {(r[0], r[1]) for r in rows[1:]}
    assert ("eps=0", "local_sums") in kinds and ("eps=1", "twisted_series") in kinds
    # the nontrivial class shows +1 local sums at even degrees, not -1
    sums = [r for r in rows[1:] if r[0] == "eps=1" and r[1] == "local_sums"][0]
    assert int(sums[2]) == -1 and int(sums[3]) == 1


def test_averages(tmp_path):
    out = tmp_path / "avg.csv"
    rc = main(["averages", "--q", "3", "--group", "2", "--d", "4",
               "--rho", "1", "--place", "0,1", "--power", "2",
               "--mode", "A", "--out", str(out)])
    assert rc == 0
    rows = read_csv(out)
    assert rows[1][0] == "A" and int(rows[1][2]) == 108


def test_stats_clt_and_determinism(tmp_path):
    args = ["stats-clt", "--q", "3", "--group", "2", "--d", "6",
            "--beta", "0.25", "--sample", "20", "--seed", "11"]
    out1, out2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
    assert main(args + ["--out", str(out1), "--workers", "1"]) == 0
    assert main(args + ["--out", str(out2), "--workers", "2"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.with_suffix(".report.json").read_bytes() == \
        out2.with_suffix(".report.json").read_bytes()
    rep = json.loads(out1.with_suffix(".report.json").read_text())
    assert rep["schedule"]["seed"] == 11
    assert "clt_per_rho" in rep and "mean_density" in rep


def test_rerun_byte_identical(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (out1, out2):
        assert main(["lfun", "--q", "3", "--group", "2", "--d", "4",
                     "--out", str(out)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_config_file(tmp_path):
    cfgp = tmp_path / "cfg.json"
    cfgp.write_text(json.dumps({"q": 3, "group": "2", "d": 2}))
    out = tmp_path / "en.csv"
    assert main(["enumerate", "--config", str(cfgp), "--out", str(out)]) == 0
    assert len(read_csv(out)) - 1 == 18
    # flag overrides file
    out2 = tmp_path / "en0.csv"
    assert main(["enumerate", "--config", str(cfgp), "--d", "0",
                 "--out", str(out2)]) == 0
    assert len(read_csv(out2)) - 1 == 2


def test_console_entrypoint(tmp_path):
    r = run_cli(["enumerate", "--q", "3", "--group", "2", "--d", "0",
                 "--out", "e.csv"], tmp_path)
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "e.csv").exists()


def test_averages_rejects_bad_place(tmp_path):
    rc = main(["averages", "--q", "3", "--group", "2", "--d", "4",
               "--rho", "1", "--place", "2,0,1", "--power", "2",
               "--mode", "A", "--out", str(tmp_path / "x.csv")])
    assert rc == 2  # x^2 + 2 is reducible over F_3
