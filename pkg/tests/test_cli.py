import json
import subprocess
import sys
from pathlib import Path

from reinhardt.cli import main, strip_timestamp
from reinhardt.series import LaurentSeries

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def cfg(name: str) -> str:
    return str(CONFIGS / name)


def test_norms_csv(capsys):
    assert main(["norms", "--config", cfg("annulus.json")]) == 0
    rows = [l for l in capsys.readouterr().out.splitlines() if not l.startswith("#")]
    assert rows[0].startswith("alpha_1,norm_sq")
    assert len(rows) == 1 + 7


def test_norms_hartogs_has_inf_rows(capsys):
    assert main(["norms", "--config", cfg("hartogs.json")]) == 0
    out = capsys.readouterr().out
    assert "-1,0,inf," in out


def test_malformed_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "annulus_product", "dim": 1, "radii": [[0.5, 1.0]], "colour": 3}))
    assert main(["norms", "--config", str(bad)]) == 2
    assert "colour" in capsys.readouterr().err
    (tmp_path / "broken.json").write_text("{not json")
    assert main(["norms", "--config", str(tmp_path / "broken.json")]) == 2
    assert main(["norms"]) == 2
    assert main(["cover", "--config", cfg("log_ball.json"), "--samples", "-1"]) == 2


def test_project_punctured_disc(tmp_path):
    coeffs = tmp_path / "f.txt"
    coeffs.write_text("0 1.0 2.0\n1 3.0 0.0\n5 0.0 1.0\n")
    out = tmp_path / "g.txt"
    assert main(["project", "--config", cfg("punctured_disc.json"), "--coeffs", str(coeffs),
                 "--out", str(out)]) == 0
    body = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert LaurentSeries.from_lines(body, 1) == LaurentSeries(1, {(0,): 1 - 2j})


def test_project_empty_file(tmp_path):
    coeffs = tmp_path / "empty.txt"
    coeffs.write_text("# nothing\n")
    out = tmp_path / "g.txt"
    assert main(["project", "--config", cfg("annulus.json"), "--coeffs", str(coeffs), "--out", str(out)]) == 0
    assert [l for l in out.read_text().splitlines() if not l.startswith("#")] == []


def test_project_with_oracle(capsys):
    assert main(["project", "--config", cfg("annulus.json"), "--coeffs", cfg("f.txt"), "--oracle"]) == 0
    report = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert report["pass"] and report["max_discrepancy"] <= 1e-8


def test_project_needs_coeffs():
    assert main(["project", "--config", cfg("annulus.json")]) == 2


def test_extend(capsys):
    assert main(["extend", "--config", cfg("annulus.json"), "--degree-cap", "60"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["window"] == [[0.25, 2.0]]
    assert data["certificate"]["pass"] and data["inside_window"]
    assert main(["extend", "--config", cfg("broken_window.json")]) == 1


def test_extend_rejects_other_domains():
    assert main(["extend", "--config", cfg("hartogs.json")]) == 2
    assert main(["extend", "--config", cfg("punctured_disc.json")]) == 2


def test_cover_writes_geometry(tmp_path):
    out = tmp_path / "cover.json"
    assert main(["cover", "--config", cfg("log_ball.json"), "--samples", "80", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["certificate"]["pass"]
    assert (tmp_path / "cover.hull.csv").read_text().startswith("t_1,t_2\n")
    assert (tmp_path / "cover.patches.csv").exists()


def test_cover_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["cover", "--config", cfg("log_ball.json"), "--out", str(p)]) == 0
    assert strip_timestamp(a.read_text()) == strip_timestamp(b.read_text())
    assert (tmp_path / "a.hull.csv").read_bytes() == (tmp_path / "b.hull.csv").read_bytes()


def test_kernel_command(capsys, tmp_path):
    coeffs = tmp_path / "f.txt"
    coeffs.write_text("1 1.0 0.0\n-1 1.0 0.0\n")
    assert main(["kernel", "--config", cfg("annulus.json"), "--coeffs", str(coeffs)]) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data["evaluations"]) == 2
    assert all(r["reproducing_residual"] <= 1e-8 for r in data["evaluations"])


def test_verify_list(capsys):
    assert main(["verify", "--list"]) == 0
    names = [l.split()[0] for l in capsys.readouterr().out.splitlines()]
    assert names == ["norms", "friedrichs", "extension", "kernel", "cover"]


def test_verify_passes_and_names_failures(capsys):
    assert main(["verify", "--config", cfg("annulus.json")]) == 0
    capsys.readouterr()
    assert main(["verify", "--config", cfg("broken_window.json")]) == 1
    data = json.loads(capsys.readouterr().out)
    assert data["failed"] == ["extension.certificate"]


def test_verify_unknown_suite(tmp_path):
    c = tmp_path / "c.json"
    c.write_text(json.dumps({"kind": "annulus_product", "dim": 1, "radii": [[0.5, 1.0]], "suites": ["nope"]}))
    assert main(["verify", "--config", str(c)]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "reinhardt", "verify", "--list"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "cover" in proc.stdout
