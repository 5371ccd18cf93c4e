"""Command-line interface tests, run in process through main(argv).

Exit code contract: 0 success (or cospectral verdict), 1 distinguished
verdict from compare, 2 usage errors, 3 numerical failures."""

import json

import numpy as np
import pytest

from qswiso import __version__
from qswiso.cli import main, parse_edge, parse_grid
from qswiso.errors import NumericalError

P3 = "name:path:3"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_spectrum_closed_form_at_omega_zero(capsys) -> None:
    code, out, _ = run(capsys, "spectrum", "--graph", P3, "--omega", "0")
    assert code == 0
    payload = json.loads(out)
    assert payload["config"]["command"] == "spectrum"
    assert payload["config"]["version"] == __version__
    assert payload["cardinality"] == 9
    got = sorted(v[0] for v in payload["values"])
    # path-3 laplacian modes {0, 1, 3} and pair decay rates (d_i + d_j)/2
    want = sorted([0.0, -1.0, -3.0, -1.5, -1.5, -1.5, -1.5, -1.0, -1.0])
    assert np.allclose(got, want, atol=1e-9)
    assert all(v[1] == 0.0 for v in payload["values"])
    assert payload["distinct"] == 4


def test_spectrum_csv_embeds_config(capsys) -> None:
    code, out, _ = run(capsys, "spectrum", "--graph", P3, "--omega", "0.5",
                       "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == f"# qswiso {__version__}"
    assert lines[1].startswith("# config ")
    cfg = json.loads(lines[1][len("# config "):])
    assert cfg["params"]["omega"] == 0.5
    assert lines[2] == "re,im"
    assert len(lines) == 3 + 9


def test_missing_graph_file_exits_2(capsys) -> None:
    code, _, err = run(capsys, "spectrum", "--graph", "/nonexistent.g6",
                       "--omega", "0")
    assert code == 2
    assert err.startswith("qswiso: error:")


def test_malformed_json_graph_exits_2(capsys, tmp_path) -> None:
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": 3}')
    code, _, err = run(capsys, "spectrum", "--graph", str(bad), "--omega", "0")
    assert code == 2
    assert "'n' and 'edges'" in err


def test_compare_isomorphic_relabeling(capsys, tmp_path) -> None:
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    a.write_text(json.dumps({"n": 4, "edges": [[0, 1], [1, 2], [2, 3]]}))
    b.write_text(json.dumps({"n": 4, "edges": [[2, 0], [0, 3], [3, 1]]}))
    code, out, _ = run(capsys, "compare", "--g1", str(a), "--g2", str(b),
                       "--omega", "0.7")
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] == "cospectral-within-tolerance"
    assert payload["delta"] < payload["tolerance"]


def test_compare_distinguishes_trees(capsys, tmp_path) -> None:
    star = tmp_path / "star.json"
    star.write_text(json.dumps({"n": 4, "edges": [[0, 1], [0, 2], [0, 3]]}))
    code, out, _ = run(capsys, "compare", "--g1", "name:path:4", "--g2",
                       str(star), "--omega", "0")
    assert code == 1
    payload = json.loads(out)
    assert payload["verdict"] == "distinguished"
    assert payload["delta"] > payload["tolerance"]


def test_compare_size_mismatch(capsys) -> None:
    code, out, _ = run(capsys, "compare", "--g1", P3, "--g2", "name:path:4",
                       "--omega", "0.5")
    assert code == 1
    payload = json.loads(out)
    assert payload["verdict"] == "distinguished"
    assert "vertex counts differ" in payload["note"]


def test_sweep_grid_rows(capsys) -> None:
    code, out, _ = run(capsys, "sweep", "--g1", P3, "--g2", P3,
                       "--omega-grid", "0:1:11", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[2] == "omega,delta"
    rows = [line.split(",") for line in lines[3:]]
    assert len(rows) == 11
    assert float(rows[0][0]) == 0.0
    assert float(rows[-1][0]) == 1.0
    assert all(float(d) == 0.0 for _, d in rows)


def test_sweep_size_mismatch_exits_2(capsys) -> None:
    code, _, err = run(capsys, "sweep", "--g1", P3, "--g2", "name:path:4")
    assert code == 2
    assert "equal vertex counts" in err


def test_reconstruct_roundtrip(capsys) -> None:
    code, out, _ = run(capsys, "reconstruct", "--graph", P3, "--omega", "0.5",
                       "--edge", "1,3", "--epsilon", "1e-3")
    assert code == 0
    payload = json.loads(out)
    assert payload["config"]["params"]["source"] == "forward"
    # the full 9-dim system is structurally unidentifiable; the visible
    # 6-dim factor comes back and matches the direct eigensolve
    assert payload["meta"]["visible_dim"] == 6
    assert payload["meta"]["deflation"] == 3
    assert payload["delta_direct"] < 1e-4
    assert len(payload["spectrum"]) == 6


def test_reconstruct_rejects_graph_edge(capsys) -> None:
    code, _, err = run(capsys, "reconstruct", "--graph", P3, "--omega", "0.5",
                       "--edge", "1,2")
    assert code == 2
    assert "aux edge" in err


def test_simulate_deterministic_and_frozen(capsys) -> None:
    argv = ("simulate", "--graph", P3, "--omega", "0.5", "--edge", "1,3",
            "--epsilon", "0.05", "--dt", "5", "--windows", "40",
            "--burn-in", "20", "--seed", "13", "--format", "json")
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    payload = json.loads(out1)
    # frozen draw for the pinned Philox key (13, 0)
    assert payload["total_counts"] == 4
    assert payload["cumulants_per_time"][0] == pytest.approx(0.02)
    assert len(payload["counts"]) == 40


def test_simulate_csv_writes_sidecar(capsys, tmp_path) -> None:
    out_path = tmp_path / "run.csv"
    code, out, _ = run(capsys, "simulate", "--graph", P3, "--omega", "0.5",
                       "--edge", "1,3", "--epsilon", "0.05", "--dt", "5",
                       "--windows", "40", "--burn-in", "20", "--seed", "13",
                       "--out", str(out_path))
    assert code == 0
    lines = out_path.read_text().strip().splitlines()
    assert lines[0] == f"# qswiso {__version__}"
    assert lines[1].startswith("# config ")
    assert lines[2] == "window,count"
    counts = [int(line.split(",")[1]) for line in lines[3:]]
    assert sum(counts) == 4
    sidecar = json.loads((tmp_path / "run.meta.json").read_text())
    assert sidecar["config"]["command"] == "simulate"
    assert sidecar["total_counts"] == 4
    assert sidecar["seed"] == 13
    # the command also echoes the summary to stdout
    assert json.loads(out)["total_counts"] == 4


def test_search_finds_cospectral_pair(capsys, tmp_path) -> None:
    catalog = tmp_path / "n6.g6"
    catalog.write_text("ECZo\nECz_\nECzo\n")
    code, out, _ = run(capsys, "search-cospectral", "--catalog", str(catalog),
                       "--invariants", "L")
    assert code == 0
    payload = json.loads(out)
    assert payload["n_graphs"] == 3
    assert payload["classification"]["omega-distinguished"] == 1
    (pair,) = payload["pairs"]
    assert set(pair["g6"]) == {"ECZo", "ECz_"}
    assert pair["deltas"]["L"] < 1e-10
    assert pair["deltas"]["omega"] > 1.0


def test_search_large_catalog_needs_flag(capsys, tmp_path) -> None:
    catalog = tmp_path / "n9.g6"
    catalog.write_text("H?AFAp]\nH?BEDa{\n")
    code, _, err = run(capsys, "search-cospectral", "--catalog", str(catalog))
    assert code == 2
    assert "--allow-large" in err
    code, out, _ = run(capsys, "search-cospectral", "--catalog", str(catalog),
                       "--allow-large")
    assert code == 0
    assert json.loads(out)["n_graphs"] == 2


def test_numerical_failure_exits_3(capsys, monkeypatch) -> None:
    import qswiso.cli as cli_mod

    def boom(*a, **k):
        raise NumericalError("synthetic failure")

    monkeypatch.setattr(cli_mod, "omega_spectrum", boom)
    code, _, err = run(capsys, "spectrum", "--graph", P3, "--omega", "0.5")
    assert code == 3
    assert err.startswith("qswiso: numerical failure:")


def test_version_flag(capsys) -> None:
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.strip() == f"qswiso {__version__}"


def test_parse_edge_and_grid_helpers() -> None:
    assert parse_edge("1,3") == (0, 2)
    with pytest.raises(ValueError):
        parse_edge("1")
    with pytest.raises(ValueError):
        parse_edge("0,2")  # 1-based on the command line
    grid = parse_grid("0:1:5")
    assert np.allclose(grid, [0.0, 0.25, 0.5, 0.75, 1.0])
    with pytest.raises(ValueError):
        parse_grid("0:2:5")
    with pytest.raises(ValueError):
        parse_grid("0:1")
