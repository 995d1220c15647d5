import json

import pytest

from schreier import cli


def run(capsys, *args):
    code = cli.main(list(args))
    out = capsys.readouterr().out.strip().splitlines()[-1]
    return code, json.loads(out)


def test_gen_conf_reg_and_determinism(tmp_path, capsys):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    code, rep = run(capsys, "gen", "--kind", "conf-reg", "--deg", "4", "--n", "100",
                    "--seed", "7", "--out", str(a))
    assert code == 0 and rep["ok"] and rep["n"] == 100 and rep["m"] == 200
    code, _ = run(capsys, "gen", "--kind", "conf-reg", "--deg", "4", "--n", "100",
                  "--seed", "7", "--out", str(b))
    assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_odd_product_fails(tmp_path, capsys):
    code, rep = run(capsys, "gen", "--kind", "conf-reg", "--deg", "3", "--n", "5",
                    "--seed", "1", "--out", str(tmp_path / "x.txt"))
    assert code == 1 and not rep["ok"] and "even" in rep["error"]


def test_orient_euler_and_odd_failure(tmp_path, capsys):
    g = tmp_path / "c4.txt"
    g.write_text("4 4\n0 1\n1 2\n2 3\n3 0\n")
    code, rep = run(capsys, "orient", "--in", str(g), "--mode", "euler",
                    "--out", str(tmp_path / "o.txt"))
    assert code == 0 and rep["balanced"]
    p3 = tmp_path / "p3.txt"
    p3.write_text("3 2\n0 1\n1 2\n")
    code, rep = run(capsys, "orient", "--in", str(p3), "--mode", "euler",
                    "--out", str(tmp_path / "o2.txt"))
    assert code == 1 and "odd-degree" in rep["error"] and "[0, 2]" in rep["error"]


def test_orient_canonical_deterministic(tmp_path, capsys):
    g = tmp_path / "g.txt"
    run(capsys, "gen", "--kind", "conf-reg", "--deg", "4", "--n", "12",
        "--seed", "3", "--out", str(g))
    o1, o2 = tmp_path / "o1.txt", tmp_path / "o2.txt"
    code, _ = run(capsys, "orient", "--in", str(g), "--mode", "canonical",
                  "--seed", "11", "--out", str(o1))
    assert code == 0
    run(capsys, "orient", "--in", str(g), "--mode", "canonical",
        "--seed", "11", "--out", str(o2))
    assert o1.read_bytes() == o2.read_bytes()


def test_decorate_and_shift_check(tmp_path, capsys):
    g = tmp_path / "g.txt"
    run(capsys, "gen", "--kind", "conf-reg", "--deg", "4", "--n", "20",
        "--seed", "5", "--out", str(g))
    d = tmp_path / "dec.json"
    code, rep = run(capsys, "decorate", "--in", str(g), "--seed", "2", "--out", str(d))
    assert code == 0 and rep["ok"] and rep["d"] == 2
    code, rep = run(capsys, "stats", "--decoration", str(d), "--radius", "2",
                    "--shift-check", "1")
    assert code == 0 and rep["shift_tv"] == 0.0


def test_decorate_irregular_fails(tmp_path, capsys):
    g = tmp_path / "bad.txt"
    g.write_text("3 2\n0 1\n1 2\n")
    code, rep = run(capsys, "decorate", "--in", str(g), "--seed", "1",
                    "--out", str(tmp_path / "d.json"))
    assert code == 1 and "regular" in rep["error"]


def test_color_konig_and_purple(tmp_path, capsys):
    k33 = tmp_path / "k33.txt"
    k33.write_text("6 9\n" + "\n".join(f"{i} {3 + j}" for i in range(3) for j in range(3)) + "\n")
    code, rep = run(capsys, "color", "--in", str(k33), "--mode", "konig",
                    "--out", str(tmp_path / "c.txt"))
    assert code == 0 and rep["palette"] == 3 and rep["class_sizes"] == [3, 3, 3]

    ch = tmp_path / "ch.txt"
    run(capsys, "gen", "--kind", "chord-cycle", "--cycle-len", "200",
        "--chord-gap", "10", "--seed", "0", "--out", str(ch))
    code, rep = run(capsys, "color", "--in", str(ch), "--mode", "purple", "--r", "10",
                    "--out", str(tmp_path / "p.txt"))
    assert code == 0 and rep["ok"]
    assert rep["density_last_color"] <= 4 / 10


def test_color_verify_subflag_catches_tampering(tmp_path, capsys):
    k33 = tmp_path / "k33.txt"
    k33.write_text("6 9\n" + "\n".join(f"{i} {3 + j}" for i in range(3) for j in range(3)) + "\n")
    out = tmp_path / "c.txt"
    run(capsys, "color", "--in", str(k33), "--mode", "konig", "--out", str(out))
    code, rep = run(capsys, "color", "--in", str(k33), "--verify", str(out))
    assert code == 0 and rep["ok"]
    lines = out.read_text().splitlines()
    lines[1] = lines[1].split()[0] + " " + lines[0].split()[1]  # duplicate a color
    out.write_text("\n".join(lines) + "\n")
    code, rep = run(capsys, "color", "--in", str(k33), "--verify", str(out))
    assert code == 1 and not rep["ok"] and "conflict" in rep


def test_color_almost_proper_cli(tmp_path, capsys):
    g = tmp_path / "g.txt"
    run(capsys, "gen", "--kind", "bipartite-reg", "--deg", "3", "--n-per-side", "60",
        "--seed", "6", "--out", str(g))
    code, rep = run(capsys, "color", "--in", str(g), "--mode", "almost-proper",
                    "--r-schedule", "4,5", "--out", str(tmp_path / "c.txt"))
    assert code == 0 and rep["palette"] == 4
    assert rep["density_last_color"] <= rep["target_density"]


def test_stats_exact_and_budget_error(tmp_path, capsys, monkeypatch):
    g = tmp_path / "g.txt"
    run(capsys, "gen", "--kind", "conf-reg", "--deg", "4", "--n", "16",
        "--seed", "9", "--out", str(g))
    dump = tmp_path / "dump.txt"
    code, rep = run(capsys, "stats", "--in", str(g), "--radius", "1", "--out", str(dump))
    assert code == 0 and rep["involution_tv"] == 0.0
    assert dump.exists() and len(dump.read_text().splitlines()) == rep["support"]
    monkeypatch.setenv("SCHREIER_WORK_BUDGET", "2")
    code, rep = run(capsys, "stats", "--in", str(g), "--radius", "3")
    assert code == 1 and "budget" in rep["error"]


def test_stats_ingests_orientation_marks(tmp_path, capsys):
    g = tmp_path / "g.txt"
    g.write_text("4 4\n0 1\n1 2\n2 3\n3 0\n")
    o = tmp_path / "o.txt"
    run(capsys, "orient", "--in", str(g), "--mode", "euler", "--out", str(o))
    code, rep = run(capsys, "stats", "--in", str(g), "--radius", "1",
                    "--orientation", str(o))
    assert code == 0 and rep["orientation"] == str(o)


def test_stats_sampled_requires_seed(tmp_path, capsys):
    g = tmp_path / "g.txt"
    run(capsys, "gen", "--kind", "conf-reg", "--deg", "2", "--n", "8",
        "--seed", "4", "--out", str(g))
    code, rep = run(capsys, "stats", "--in", str(g), "--radius", "1", "--samples", "50")
    assert code == 1 and "seed" in rep["error"]


def test_orientation_law_command(tmp_path, capsys):
    w = tmp_path / "w.json"
    run(capsys, "gen", "--kind", "tree-window", "--depth", "2", "--half-cap", "2",
        "--seed", "9", "--out", str(w))
    code, rep = run(capsys, "orientation-law", "--window", str(w), "--root", "0",
                    "--samples", "20000", "--seed", "4")
    assert code == 0 and rep["ok"]
    assert abs(rep["oracle_mass_sum"] - 1.0) <= 1e-12
    assert rep["tv_against_oracle"] < 0.05
    assert rep["tv_between_roots"] < 0.05


def test_sparse_label_command(tmp_path, capsys):
    g = tmp_path / "g.txt"
    run(capsys, "gen", "--kind", "conf-reg", "--deg", "4", "--n", "30",
        "--seed", "2", "--out", str(g))
    code, rep = run(capsys, "sparse-label", "--in", str(g), "--r", "2")
    assert code == 0 and rep["ok"] and rep["k"] >= 5
