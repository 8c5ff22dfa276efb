"""Tests for the command-line interface."""

import io
import json
import math

import pytest

import main
import treeaut
from treeaut.constants import ConstantsReport
from treeaut.experiments import CSV_HEADER


@pytest.fixture
def run(sample_config_yaml, capsys):
    """Run main() with the test config and return (exit code, stdout, stderr)."""
    def _run(*argv):
        code = main.main(["--config", sample_config_yaml, *argv])
        out, err = capsys.readouterr()
        return code, out, err
    return _run


@pytest.fixture
def run_config(tmp_path, capsys):
    """Run main() with a config file holding the given YAML text."""
    def _run(yaml_text, *argv):
        path = tmp_path / "custom.yaml"
        path.write_text(yaml_text)
        code = main.main(["--config", str(path), *argv])
        out, err = capsys.readouterr()
        return code, out, err
    return _run


PATH8_EDGES = "\n".join(f"{v} {v + 1}" for v in range(7)) + "\n"


class TestAut:
    """Tests for the aut subcommand."""

    def test_rooted_star(self, run):
        """Test the four-leaf star."""
        code, out, _ = run("aut", "(()()()())")
        assert code == 0
        exact, log_value = out.split()
        assert exact == "24"
        assert float(log_value) == pytest.approx(math.log(24))

    def test_edges_from_stdin(self, run, monkeypatch):
        """Test an edge list read from standard input."""
        monkeypatch.setattr("sys.stdin", io.StringIO("0 1\n1 2\n2 3\n"))
        code, out, _ = run("aut")
        assert code == 0
        assert out.split()[0] == "2"

    def test_from_file(self, run, tmp_path):
        """Test a tree read from a file."""
        path = tmp_path / "tree.txt"
        path.write_text("((()())(()()))\n")
        code, out, _ = run("aut", "--file", str(path))
        assert code == 0
        assert out.split()[0] == "8"

    def test_check(self, run):
        """Test the brute-force cross-check agrees."""
        code, _, _ = run("aut", "--check", "((())(()))")
        assert code == 0

    def test_check_mismatch(self, run, mocker):
        """Test a disagreeing oracle gives exit 1."""
        mocker.patch("main.brute_force_aut", return_value=mocker.Mock(exact=5))
        code, _, _ = run("aut", "--check", "(()())")
        assert code == 1

    def test_bad_tree(self, run):
        """Test malformed input gives exit 2."""
        code, _, err = run("aut", "(()")
        assert code == 2
        assert "Error" in err

    def test_missing_file(self, run, tmp_path):
        """Test a missing file gives exit 2."""
        code, _, _ = run("aut", "--file", str(tmp_path / "absent.txt"))
        assert code == 2

    def test_orbits(self, run):
        """Test orbit blocks of a five-vertex path follow the counts."""
        code, out, _ = run("aut", "--orbits", "--check", "0 1\n1 2\n2 3\n3 4\n")
        assert code == 0
        assert out.splitlines()[2:] == ["0 4", "1 3", "2"]

    def test_exact_orbits(self, run):
        """Test the automorphism search gives the same blocks."""
        code, out, _ = run("aut", "--orbits", "--exact", PATH8_EDGES)
        assert code == 0
        assert out.splitlines()[2:] == ["0 7", "1 6", "2 5", "3 4"]

    def test_orbits_need_free_tree(self, run):
        """Test orbits of a parenthesis tree are refused."""
        code, _, _ = run("aut", "--orbits", "(()())")
        assert code == 2

    def test_orbits_mismatch(self, run, mocker):
        """Test disagreeing orbit partitions give exit 1."""
        real = main.vertex_orbits
        mocker.patch("main.vertex_orbits", side_effect=lambda tree, exact, limit: [[0]] if exact else real(tree))
        code, _, _ = run("aut", "--orbits", "--check", "0 1\n1 2\n")
        assert code == 1

    def test_exact_orbit_cap_from_config(self, run_config):
        """Test exact_orbit_cap in the config file limits the automorphism search."""
        code, _, err = run_config("enumeration:\n  exact_orbit_cap: 4\n", "aut", "--orbits", "--exact", PATH8_EDGES)
        assert code == 2
        assert "limited to n <= 4" in err
        code, _, _ = run_config("enumeration:\n  exact_orbit_cap: 8\n", "aut", "--orbits", "--exact", PATH8_EDGES)
        assert code == 0


class TestCount:
    """Tests for the count subcommand."""

    def test_table(self, run):
        """Test the first rows of r_n and u_n."""
        code, out, _ = run("count", "--max", "7")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "n,rooted,unrooted"
        assert lines[1:] == ["1,1,1", "2,1,1", "3,2,1", "4,4,2", "5,9,3", "6,20,6", "7,48,11"]

    def test_check(self, run):
        """Test the counts agree with enumeration."""
        code, _, _ = run("count", "--max", "9", "--check")
        assert code == 0


class TestSample:
    """Tests for the sample subcommand."""

    def test_rooted(self, run):
        """Test rooted samples print one parenthesis string each."""
        code, out, _ = run("sample", "--family", "polya-rooted", "--n", "6", "--count", "3", "--seed", "4")
        assert code == 0
        lines = out.splitlines()
        assert len(lines) == 3
        assert all(line.count("(") == 6 for line in lines)

    def test_unrooted(self, run):
        """Test unrooted samples print edge lists separated by blank lines."""
        code, out, _ = run("sample", "--family", "labeled-unrooted", "--n", "4", "--count", "2", "--seed", "4")
        assert code == 0
        blocks = out.strip().split("\n\n")
        assert [len(b.splitlines()) for b in blocks] == [3, 3]

    def test_reproducible(self, run):
        """Test the same seed prints the same trees."""
        first = run("sample", "--family", "plane", "--n", "15", "--count", "2", "--seed", "9")[1]
        second = run("sample", "--family", "plane", "--n", "15", "--count", "2", "--seed", "9")[1]
        assert first == second

    def test_unattainable(self, run):
        """Test an even order for full binary trees gives exit 2."""
        code, _, _ = run("sample", "--family", "full-binary", "--n", "8", "--seed", "1")
        assert code == 2


class TestConstants:
    """Tests for the constants subcommand."""

    def test_json_and_expect(self, run, mocker):
        """Test the report is printed and matched against the known values."""
        report = ConstantsReport("labeled", 0.05229, 0.0395, {"J_max": 10, "N": 40}, {"mu": 0.0})
        compute = mocker.patch("main.mu_sigma_labeled", return_value=report)
        code, out, _ = run("constants", "--family", "labeled", "--expect")
        assert code == 0
        assert json.loads(out)["mu"] == 0.05229
        assert compute.call_args[0][0] == 10

    def test_expect_mismatch(self, run, mocker):
        """Test values off the known constants give exit 1."""
        report = ConstantsReport("polya-rooted", 0.2, 0.1967696)
        mocker.patch("main.mu_sigma_polya", return_value=report)
        code, _, _ = run("constants", "--family", "polya", "--expect")
        assert code == 1

    def test_not_converged(self, run, mocker):
        """Test a flagged report gives exit 1."""
        report = ConstantsReport("full-binary", 0.09, 0.025, converged=False)
        mocker.patch("main.mu_sigma_bounded_degree", return_value=report)
        code, _, _ = run("constants", "--family", "full-binary")
        assert code == 1

    def test_unbounded_family(self, run):
        """Test plane trees are refused with exit 2."""
        code, _, _ = run("constants", "--family", "plane")
        assert code == 2

    def test_unrooted_check(self, run, mocker):
        """Test the U(x, t) check result is appended."""
        mocker.patch("main.mu_sigma_labeled", return_value=ConstantsReport("labeled", 0.05, 0.04))
        code, out, _ = run("constants", "--family", "labeled", "--unrooted-check", "--t-values", "0,-1", "--n-max", "8")
        assert code == 0
        assert json.loads(out.splitlines()[-1])["unrooted_check"]["passed"] is True


class TestSeries:
    """Tests for the series subcommand."""

    def test_rooted_counts(self, run):
        """Test r_n is written as n,coefficient rows."""
        code, out, _ = run("series", "--kind", "rooted-counts", "--order", "7")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "n,coefficient"
        assert lines[2:] == ["1,1", "2,1", "3,2", "4,4", "5,9", "6,20", "7,48"]

    def test_polya_at_zero_is_counts(self, run):
        """Test p_n(0) reproduces r_n."""
        code, out, _ = run("series", "--order", "10")
        assert code == 0
        rows = [line.split(",") for line in out.splitlines()[1:]]
        assert [int(n) for n, _ in rows] == list(range(11))
        assert [float(c) for _, c in rows[1:]] == [1, 1, 2, 4, 9, 20, 48, 115, 286, 719]

    def test_default_order_from_config(self, run):
        """Test the order defaults to series.polya_order."""
        code, out, _ = run("series", "--kind", "unrooted-counts")
        assert code == 0
        assert len(out.splitlines()) == 1 + 31

    def test_output_file(self, run, tmp_path):
        """Test --output writes the CSV to a file."""
        path = tmp_path / "series.csv"
        code, out, _ = run("series", "--t", "-1", "--order", "5", "--output", str(path))
        assert code == 0
        assert out == ""
        lines = path.read_text().splitlines()
        assert lines[0] == "n,coefficient"
        # P(x, -1) is the labeled series: n^(n-1) / n!
        assert float(lines[5].split(",")[1]) == pytest.approx(4 ** 3 / 24)

    def test_partition(self, run):
        """Test c(1, t) = 1 and c(2, 1) = 3."""
        code, out, _ = run("series", "--kind", "partition", "--t", "1", "--order", "2")
        assert code == 0
        assert out.splitlines()[1:] == ["0,0.0", "1,1.0", "2,3.0"]

    def test_partition_cutoff(self, run):
        """Test c_N(2, 1) = 1 once N = 1 drops the 2! toll."""
        code, out, _ = run("series", "--kind", "partition", "--t", "1", "--order", "2", "--cutoff", "1")
        assert code == 0
        assert out.splitlines()[-1] == "2,1.0"

    def test_partition_cap_from_config(self, run_config):
        """Test partition_cap in the config file refuses larger j."""
        code, _, err = run_config("series:\n  partition_cap: 5\n", "series", "--kind", "partition", "--order", "10")
        assert code == 2
        assert "limit 5" in err
        code, out, _ = run_config("series:\n  partition_cap: 5\n", "series", "--kind", "partition", "--order", "5")
        assert code == 0
        assert len(out.splitlines()) == 7

    def test_t_bound_from_config(self, run, run_config):
        """Test weighted_t_bound in the config file refuses larger t."""
        code, _, err = run_config("series:\n  weighted_t_bound: 0.5\n", "series", "--t", "2", "--order", "8")
        assert code == 2
        assert "limit 0.5" in err
        code, _, _ = run("series", "--t", "2", "--order", "8")
        assert code == 0


class TestClt:
    """Tests for the clt subcommand."""

    def test_missing_seed(self, run):
        """Test sampling without a seed gives exit 2."""
        code, _, err = run("clt", "--sizes", "10")
        assert code == 2
        assert "--seed" in err

    def test_paths_refused(self, run):
        """Test the degenerate family gives exit 2."""
        code, _, err = run("clt", "--family", "paths", "--sizes", "10", "--seed", "1")
        assert code == 2
        assert "identically 0" in err

    def test_csv_and_report(self, run, tmp_path):
        """Test the samples CSV and the report file are written."""
        csv_path = tmp_path / "samples.csv"
        report_path = tmp_path / "report.json"
        code, _, _ = run(
            "clt", "--sizes", "10,20", "--samples", "12", "--seed", "5", "--workers", "1",
            "--output", str(csv_path), "--report", str(report_path),
        )
        assert code in (0, 1)
        lines = csv_path.read_text().splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert len(lines) == 25
        report = json.loads(report_path.read_text())
        assert [s["n"] for s in report["sizes"]] == [10, 20]

    def test_from_csv(self, run, tmp_path):
        """Test an existing CSV is summarized without sampling."""
        csv_path = tmp_path / "samples.csv"
        rows = [f"plane,{n},{i},{0.1 * n + (i % 5) * 0.01!r}" for n in (10, 20) for i in range(10)]
        csv_path.write_text(",".join(CSV_HEADER) + "\n" + "\n".join(rows) + "\n")
        report_path = tmp_path / "report.json"
        code, out, _ = run("clt", "--from-csv", str(csv_path), "--report", str(report_path))
        assert code in (0, 1)
        assert out == ""
        report = json.loads(report_path.read_text())
        assert report["family"] == "plane"
        assert report["mean_slope"] == pytest.approx(0.1, abs=1e-9)


class TestParser:
    """Tests for argument parsing."""

    def test_version(self, capsys):
        """Test --version prints and exits."""
        with pytest.raises(SystemExit) as exc:
            main.main(["--version"])
        assert exc.value.code == 0
        assert capsys.readouterr().out.strip() == f"treeaut {treeaut.__version__}"

    def test_unknown_log_level(self, run_config):
        """Test a bad logging.log_level in the config file gives exit 2."""
        code, _, err = run_config("logging:\n  log_level: chatty\n", "count", "--max", "3")
        assert code == 2
        assert "chatty" in err

    def test_bad_sizes(self, capsys):
        """Test a malformed size list is rejected by argparse."""
        with pytest.raises(SystemExit):
            main.main(["clt", "--sizes", "10,x"])
