"""End-to-end command-line behavior and the benchmark table formats."""

import io
import json
import subprocess
import sys

import pytest

from densub.bench import (
    CSV_HEADER,
    compute_gap,
    parse_manifest,
    records_to_csv,
    records_to_json,
    records_to_text,
    run_instance,
)
from densub.cli import cli_main
from densub.graph import GraphFormatError, to_edge_list
from densub.instances import gen_demo, gen_random
from densub.maxflow import estimate_network_bytes


@pytest.fixture
def triangle_file(tmp_path):
    p = tmp_path / "triangle.txt"
    p.write_text("1 2\n2 3\n3 1\n")
    return p


@pytest.fixture
def demo_file(tmp_path):
    p = tmp_path / "demo.txt"
    to_edge_list(gen_demo(), p)
    return p


def run_cli(capsys, *argv):
    code = cli_main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSingleCommands:
    def test_peel_text(self, capsys, triangle_file):
        code, out, err = run_cli(capsys, "peel", triangle_file)
        assert code == 0
        assert "f_G = 1.0000" in out
        assert "triangle" in out

    def test_peel_report_set(self, capsys, triangle_file):
        code, out, _ = run_cli(capsys, "peel", triangle_file, "--report-set")
        assert code == 0
        assert "S = 1 2 3" in out

    def test_peel_csv(self, capsys, triangle_file):
        code, out, _ = run_cli(capsys, "peel", triangle_file, "--out", "csv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == CSV_HEADER
        cells = lines[1].split(",")
        assert cells[0] == "triangle"
        assert cells[1:3] == ["3", "3"]
        assert cells[4] == "1.0000"
        # hybrid and exact columns stay unmarked
        assert cells[5:8] == ["--", "--", "--"]
        assert cells[8] == "--" and cells[10] == "--"

    def test_exact_json(self, capsys, demo_file):
        code, out, _ = run_cli(capsys, "exact", demo_file, "--out", "json")
        assert code == 0
        row = json.loads(out)
        assert row["problem"] == "demo"
        assert row["|V|"] == 12 and row["|E|"] == 17
        assert row["f*"] == pytest.approx(11 / 7)
        assert row["certified"] is True
        assert row["iterations"] >= 1
        assert row["|S|"] == 7

    def test_exact_report_set_uses_file_labels(self, capsys, demo_file):
        code, out, _ = run_cli(capsys, "exact", demo_file, "--report-set")
        assert code == 0
        # 1-based labels in the file shift the 0-based optimum up by one
        assert "S = 2 3 4 5 6 7 8" in out

    def test_hybrid_default_skips_on_demo(self, capsys, demo_file):
        code, out, _ = run_cli(capsys, "hybrid", demo_file, "--out", "json")
        assert code == 0
        row = json.loads(out)
        assert row["skipped"] is True
        assert row["f_H"] == pytest.approx(14 / 9)

    def test_hybrid_full_route(self, capsys, demo_file):
        code, out, _ = run_cli(
            capsys, "hybrid", demo_file, "--skip-ratio", "1.0", "--out", "json"
        )
        assert code == 0
        row = json.loads(out)
        assert row["skipped"] is False
        assert row["f_H"] == pytest.approx(11 / 7)

    def test_stdin_instance(self, capsys, monkeypatch):
        monkeypatch.setattr("sys.stdin", io.StringIO("1 2\n2 3\n3 1\n"))
        code, out, _ = run_cli(capsys, "peel", "-")
        assert code == 0
        assert "stdin" in out and "f_G = 1.0000" in out

    def test_out_file(self, capsys, tmp_path, triangle_file):
        target = tmp_path / "report.csv"
        code, out, _ = run_cli(
            capsys, "peel", triangle_file, "--out", "csv", "--out-file", target
        )
        assert code == 0
        assert out == ""
        assert target.read_text().startswith(CSV_HEADER)

    def test_matrix_market_by_suffix(self, capsys, tmp_path):
        p = tmp_path / "tri.mtx"
        p.write_text(
            "%%MatrixMarket matrix coordinate pattern symmetric\n3 3 3\n2 1\n3 1\n3 2\n"
        )
        code, out, _ = run_cli(capsys, "exact", p)
        assert code == 0
        assert "f* = 1.0000" in out

    def test_weighted_flag_enforced(self, capsys, triangle_file):
        code, _, err = run_cli(capsys, "peel", triangle_file, "--weighted")
        assert code == 2
        assert "error:" in err

    def test_missing_file(self, capsys):
        code, _, err = run_cli(capsys, "peel", "no-such-file.txt")
        assert code == 2
        assert "error:" in err

    def test_json_csv_densities_agree_at_4dp(self, capsys, demo_file):
        _, json_out, _ = run_cli(capsys, "exact", demo_file, "--out", "json")
        _, csv_out, _ = run_cli(capsys, "exact", demo_file, "--out", "csv")
        row = json.loads(json_out)
        cells = csv_out.splitlines()[1].split(",")
        assert f"{row['f*']:.4f}" == cells[10] == "1.5714"


class TestGen:
    def test_worstcase_deterministic(self, capsys):
        _, out1, _ = run_cli(capsys, "gen", "worstcase", "--t", "3", "--p", "2")
        _, out2, _ = run_cli(capsys, "gen", "worstcase", "--t", "3", "--p", "2")
        assert out1 == out2
        assert len(out1.splitlines()) == 5  # t + p edges

    def test_random_deterministic_bytes(self, capsys):
        args = ("gen", "random", "--n", "30", "--m", "60", "--seed", "5")
        _, out1, _ = run_cli(capsys, *args)
        _, out2, _ = run_cli(capsys, *args)
        assert out1 == out2
        assert len(out1.splitlines()) == 60

    def test_random_seed_changes_output(self, capsys):
        _, out1, _ = run_cli(capsys, "gen", "random", "--n", "30", "--m", "60", "--seed", "1")
        _, out2, _ = run_cli(capsys, "gen", "random", "--n", "30", "--m", "60", "--seed", "2")
        assert out1 != out2

    def test_gen_to_file_then_solve(self, capsys, tmp_path):
        target = tmp_path / "inst.txt"
        code, _, _ = run_cli(
            capsys, "gen", "random", "--n", "20", "--m", "50", "--seed", "3",
            "-o", target,
        )
        assert code == 0
        code, out, _ = run_cli(capsys, "exact", target)
        assert code == 0
        assert "f* =" in out

    def test_gen_weighted(self, capsys):
        _, out, _ = run_cli(
            capsys, "gen", "random", "--n", "10", "--m", "15", "--seed", "1",
            "--integer-weights",
        )
        first = out.splitlines()[0].split()
        assert len(first) == 3
        assert float(first[2]) == int(float(first[2]))

    def test_gen_invalid_exits_1(self, capsys):
        code, _, err = run_cli(capsys, "gen", "random", "--n", "4", "--m", "99", "--seed", "1")
        assert code == 1
        assert "error:" in err


class TestLpExport:
    def test_to_file(self, capsys, tmp_path, triangle_file):
        target = tmp_path / "tri.lp"
        code, out, _ = run_cli(capsys, "lp-export", triangle_file, "--out-file", target)
        assert code == 0
        assert "variables: 6, constraints: 7" in out
        assert target.read_text().startswith("\\ density LP relaxation")

    def test_to_stdout(self, capsys, triangle_file):
        code, out, err = run_cli(capsys, "lp-export", triangle_file)
        assert code == 0
        assert out.startswith("\\ density LP relaxation")
        assert "variables: 6, constraints: 7" in err


class TestBench:
    def make_manifest(self, tmp_path, *lines):
        mf = tmp_path / "manifest.txt"
        mf.write_text("\n".join(lines) + "\n")
        return mf

    def test_two_instances_csv(self, capsys, tmp_path, triangle_file, demo_file):
        mf = self.make_manifest(
            tmp_path, "# local instances", triangle_file.name, demo_file.name
        )
        code, out, _ = run_cli(capsys, "bench", "--manifest", mf, "--out", "csv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 3
        tri = lines[1].split(",")
        assert tri[0] == "triangle"
        assert tri[4] == "1.0000" and tri[10] == "1.0000"
        demo_row = lines[2].split(",")
        assert demo_row[4] == "1.5556"
        assert demo_row[8] == "1.5556"  # default ratio skips, greedy answer
        assert demo_row[10] == "1.5714"

    def test_missing_instance_exits_2(self, capsys, tmp_path, triangle_file):
        mf = self.make_manifest(tmp_path, triangle_file.name, "absent.txt")
        code, out, _ = run_cli(capsys, "bench", "--manifest", mf, "--out", "csv")
        assert code == 2
        bad = out.splitlines()[2].split(",")
        assert bad[0] == "absent"
        assert bad[1:] == ["--"] * 10

    def test_text_reports_error_and_gap(self, capsys, tmp_path, triangle_file):
        mf = self.make_manifest(tmp_path, triangle_file.name, "absent.txt")
        code, out, _ = run_cli(capsys, "bench", "--manifest", mf)
        assert code == 2
        assert "gap: 0.00%" in out
        assert "load:" in out and "marked --" in out

    def test_algorithm_subset(self, capsys, tmp_path, triangle_file):
        mf = self.make_manifest(tmp_path, triangle_file.name)
        code, out, _ = run_cli(
            capsys, "bench", "--manifest", mf, "--algorithms", "greedy", "--out", "csv"
        )
        assert code == 0
        cells = out.splitlines()[1].split(",")
        assert cells[4] == "1.0000"
        assert cells[9] == "--" and cells[10] == "--"

    def test_jobs_parallel(self, capsys, tmp_path, triangle_file, demo_file):
        mf = self.make_manifest(tmp_path, triangle_file.name, demo_file.name)
        code, out, _ = run_cli(
            capsys, "bench", "--manifest", mf, "--jobs", "2", "--out", "csv"
        )
        assert code == 0
        assert len(out.splitlines()) == 3

    def test_route_over_memory_budget(self, capsys, tmp_path):
        g = gen_random(50, 600, 4)
        inst = tmp_path / "mid.txt"
        to_edge_list(g, inst)
        mf = self.make_manifest(tmp_path, inst.name)
        # between the load footprint and the flow-network footprint, so the
        # graph loads but the exact route must refuse to build its network
        budget_mb = (estimate_network_bytes(g) - 1) / (1024 * 1024)
        code, out, _ = run_cli(
            capsys, "bench", "--manifest", mf, "--algorithms", "exact",
            "--out", "csv", "--memory-budget-mb", repr(budget_mb),
        )
        assert code == 2
        cells = out.splitlines()[1].split(",")
        assert cells[1] == "50"  # loaded fine
        assert cells[10] == "--"  # exact refused

    def test_single_exact_over_budget_exits_2(self, capsys, demo_file):
        budget_mb = (estimate_network_bytes(gen_demo()) - 1) / (1024 * 1024)
        code, out, _ = run_cli(
            capsys, "exact", demo_file, "--memory-budget-mb", repr(budget_mb),
            "--out", "csv",
        )
        assert code == 2
        assert out.splitlines()[1].split(",")[10] == "--"

    def test_single_load_over_budget_reports_and_exits_2(self, capsys, demo_file):
        code, out, err = run_cli(
            capsys, "exact", demo_file, "--memory-budget-mb", "0.00001"
        )
        assert code == 2
        assert out == ""
        assert "error:" in err


class TestUsageErrors:
    def test_no_command(self, capsys):
        code, _, err = run_cli(capsys)
        assert code == 1
        assert "usage error" in err

    def test_unknown_flag(self, capsys, triangle_file):
        code, _, err = run_cli(capsys, "peel", triangle_file, "--bogus")
        assert code == 1

    def test_bench_needs_manifest(self, capsys):
        code, _, err = run_cli(capsys, "bench")
        assert code == 1

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli_main(["--version"])
        assert exc.value.code == 0
        assert "densub" in capsys.readouterr().out


class TestBenchHelpers:
    def test_compute_gap(self):
        assert compute_gap(1.0, 2.0) == pytest.approx(50.0)
        assert compute_gap(2.0, 2.0) == 0.0
        assert compute_gap(2.1, 2.0) == 0.0  # clamped
        with pytest.raises(ValueError):
            compute_gap(1.0, 0.0)

    def test_parse_manifest_relative_and_weighted(self, tmp_path):
        (tmp_path / "sub").mkdir()
        mf = tmp_path / "m.txt"
        mf.write_text("# c\n\nsub/a.txt weighted\n/abs/b.txt\n")
        entries = parse_manifest(mf)
        assert entries[0] == (tmp_path / "sub" / "a.txt", True)
        assert entries[1][0].as_posix() == "/abs/b.txt"
        assert entries[1][1] is None

    def test_parse_manifest_bad_token(self, tmp_path):
        mf = tmp_path / "m.txt"
        mf.write_text("a.txt directed\n")
        with pytest.raises(GraphFormatError):
            parse_manifest(mf)

    def test_run_instance_records_all_routes(self, demo):
        rec = run_instance(demo, "demo")
        assert rec.problem == "demo"
        assert rec.f_g == pytest.approx(14 / 9)
        assert rec.f_star == pytest.approx(11 / 7)
        assert rec.f_h == pytest.approx(14 / 9)
        assert not rec.failed
        assert rec.t_h == pytest.approx(rec.t_2 + rec.t_3, abs=1.0) or rec.t_h >= 0

    def test_csv_json_round_trip_consistency(self, demo):
        rec = run_instance(demo, "demo")
        csv_cells = records_to_csv([rec]).splitlines()[1].split(",")
        row = json.loads(records_to_json([rec]))[0]
        assert f"{row['f_G']:.4f}" == csv_cells[4]
        assert f"{row['f*']:.4f}" == csv_cells[10]
        assert row["load_ms"] is None  # not supplied here
        text = records_to_text([rec])
        assert "gap:" in text

    def test_csv_header_is_frozen(self):
        assert CSV_HEADER == "problem,|V|,|E|,T_G,f_G,T_2,T_3,T_H,f_H,T_E,f*"


def test_console_script_end_to_end(tmp_path):
    inst = tmp_path / "tri.txt"
    inst.write_text("1 2\n2 3\n3 1\n")
    proc = subprocess.run(
        [sys.executable, "-m", "densub.cli", "exact", str(inst), "--out", "csv"],
        capture_output=True,
        text=True,
        timeout=240,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == CSV_HEADER
    assert proc.stdout.splitlines()[1].split(",")[10] == "1.0000"
