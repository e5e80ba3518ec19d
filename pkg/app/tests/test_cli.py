import io
import json

import pytest

from cli.responses.response_types import SplitR0Response
from cli_application import CLIApplication


class Runner:
    def __init__(self, argv):
        self.out, self.err = io.StringIO(), io.StringIO()
        self.code = CLIApplication(out=self.out, err=self.err).run(argv)

    @property
    def stdout(self) -> str:
        return self.out.getvalue()

    @property
    def stderr(self) -> str:
        return self.err.getvalue()


@pytest.fixture
def run(fixtures_dir):
    def _run(*argv):
        return Runner([str(fixtures_dir / arg) if arg.endswith(".json") else arg for arg in argv])

    return _run


class TestClassify:
    def test_worked_example(self, run):
        result = run("classify", "example_split.json")
        assert result.code == 10
        assert result.stdout.splitlines()[0] == "case (a): R0=1.5 ≥ r(A)=1.3660254 > 1"

    def test_no_case_exit(self, run):
        assert run("classify", "example_split.json", "--no-case-exit").code == 0

    def test_subcritical(self, run):
        assert run("classify", "subcritical_split.json").code == 12

    def test_critical_warns(self, run):
        result = run("classify", '{"kind": "split", "T": [[0]], "F": [[1]]}')
        assert result.code == 11
        assert "warning: a value lies within tol_eq of 1" in result.stdout

    def test_strict_on_reducible(self, run):
        result = run("classify", "reducible_split.json", "--strict")
        assert result.code == 10
        assert "strictness not certified: A is reducible" in result.stdout

    def test_leslie_through_truncation(self, run):
        result = run("classify", "geo.json", "--json")
        assert result.code == 12
        payload = json.loads(result.stdout)
        assert payload["truncation_n"] == 64
        assert payload["exit_code"] == 12


class TestR0:
    def test_split(self, run):
        result = run("r0", "example_split.json")
        assert result.code == 0
        assert result.stdout.startswith("R0   = 1.5 ")
        assert "r(A) = 1.3660254" in result.stdout

    def test_json_round_trip(self, run):
        first = run("r0", "example_split.json", "--json")
        response = SplitR0Response.model_validate_json(first.stdout)
        assert response.r0.radius == pytest.approx(1.5, abs=1e-9)
        assert response == SplitR0Response.model_validate_json(run("r0", "example_split.json", "--json").stdout)

    def test_leslie(self, run):
        payload = json.loads(run("r0", "geo.json", "--json", "--truncate-n", "16").stdout)
        assert payload["kind"] == "leslie"
        assert payload["closed_form"]["value"] == pytest.approx(2.0 / 3.0)
        assert payload["truncated_r0"] == pytest.approx(2.0 / 3.0, abs=1e-9)


class TestCurve:
    def test_tsv(self, run):
        result = run("curve", "example_split.json", "--lambda-min", "1", "--lambda-max", "3", "--samples", "5")
        assert result.code == 0
        lines = result.stdout.splitlines()
        assert lines[0] == "lambda\tradius"
        assert len(lines) == 6
        assert lines[1] == "1\t1.5"
        assert "monotone: ok, convex: ok" in result.stderr

    def test_needs_a_split_model(self, run):
        result = run("curve", "geo.json", "--lambda-min", "1", "--lambda-max", "3")
        assert result.code == 1
        assert "kind" in result.stderr

    def test_bad_range(self, run):
        assert run("curve", "example_split.json", "--lambda-min", "0", "--lambda-max", "3").code == 1


class TestLeslie:
    def test_series_converges(self, run):
        result = run("leslie", "geo.json", "--truncate", "2,4,8")
        assert result.code == 0
        assert "closed-form R0 = 0.666666667" in result.stdout
        rows = [line.split("\t") for line in result.stdout.splitlines() if line[:1].isdigit()]
        assert [row[0] for row in rows] == ["2", "4", "8"]
        values = [float(row[1]) for row in rows]
        assert values == sorted(values)
        assert abs(values[-1] - 2.0 / 3.0) < 1e-4

    def test_json(self, run):
        payload = json.loads(run("leslie", "finite_leslie.json", "--truncate", "1,2", "--json").stdout)
        assert payload["p"] == "inf"
        assert payload["q"] == "1"
        assert payload["rows"][1]["r0"] == pytest.approx(1.5, abs=1e-9)

    def test_reproductive_values(self, run):
        result = run("leslie", "finite_leslie.json", "--truncate", "2", "--reproductive-values", "2")
        assert "reproductive values: 1.5, 1" in result.stdout

    def test_bad_truncation_list(self, run):
        assert run("leslie", "geo.json", "--truncate", "4,2").code == 1


class TestSimulate:
    def test_consistent(self, run):
        result = run("simulate", "example_split.json", "--steps", "200", "--burn-in", "50", "--json")
        assert result.code == 0
        payload = json.loads(result.stdout)
        assert payload["growth_rate"] == pytest.approx(payload["rA"], abs=1e-4)
        assert payload["consistent"]

    def test_text(self, run):
        result = run("simulate", "subcritical_split.json", "--steps", "100", "--x0", "1,1")
        assert result.stdout.splitlines()[-1].startswith("consistent:")

    def test_zero_initial_state(self, run):
        assert run("simulate", "example_split.json", "--steps", "10", "--x0", "0,0").code == 1

    def test_negative_initial_state(self, run):
        result = run("simulate", "example_split.json", "--steps", "10", "--x0=-1,-2")
        assert result.code == 1
        assert result.stderr.startswith("error: ")
        assert "coordinate 0" in result.stderr

    def test_missing_steps(self, run):
        result = run("simulate", "example_split.json")
        assert result.code == 1
        assert "usage: r0tool simulate" in result.stderr
        assert "--steps" in result.stderr


class TestSelfTest:
    ARGS = ("selftest", "--count", "6", "--seed", "1", "--n-max", "4")

    def test_passes(self, run):
        result = run(*self.ARGS)
        assert result.code == 0
        assert result.stdout.splitlines()[-1] == "all invariants passed"

    def test_deterministic(self, run):
        assert run(*self.ARGS).stdout == run(*self.ARGS, "--workers", "3").stdout

    def test_json(self, run):
        payload = json.loads(run(*self.ARGS, "--json").stdout)
        assert payload["count"] == 6
        assert payload["targets"] == [0.1, 0.5, 0.9]


class TestErrors:
    def test_missing_file(self, run):
        result = run("r0", "absent.json")
        assert result.code == 1
        assert result.stderr.startswith("error: ")

    def test_invalid_model(self, run):
        result = run("r0", "supercritical_T.json")
        assert result.code == 1
        assert "Invalid field 'T'" in result.stderr

    def test_unknown_command(self, run):
        result = run("plot")
        assert result.code == 1
        assert "usage: r0tool" in result.stderr
        assert "invalid choice" in result.stderr

    def test_help_goes_to_out(self, run):
        result = run("--help")
        assert result.code == 0
        assert "usage: r0tool" in result.stdout
        assert result.stderr == ""
