"""CLI tests: argument handling, JSON wire formats, exit codes."""

import json
import math
import os

import pytest

from heightforge.cli import main
from heightforge.elliptic_core import WeierstrassCurve

E37 = WeierstrassCurve(0, 0, 1, -1, 0)
ECM = WeierstrassCurve(0, 0, 0, -1, 0)


@pytest.fixture(scope="module")
def curves(tmp_path_factory):
    root = tmp_path_factory.mktemp("curves")
    paths = {}
    for name, E in (("e37", E37), ("ecm", ECM)):
        path = root / f"{name}.json"
        path.write_text(json.dumps(E.to_json_dict()))
        paths[name] = str(path)
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestUsageErrors:
    def test_no_subcommand(self, capsys):
        assert run(capsys)[0] == 1

    def test_unknown_subcommand(self, capsys):
        assert run(capsys, "bogus")[0] == 1

    def test_help_exits_zero(self, capsys):
        assert run(capsys, "--help")[0] == 0

    def test_missing_curve_file(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "heights", "--curve", str(tmp_path / "nope.json"),
            "--point", "0,0",
        )
        assert code == 1 and "error" in err

    def test_malformed_curve(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"a1": "x", "a2": "0", "a3": "1", "a4": "-1", "a6": "0"}')
        code, _, err = run(capsys, "heights", "--curve", str(bad), "--point", "0,0")
        assert code == 1 and "bad curve" in err

    def test_bad_point_syntax(self, capsys, curves):
        assert run(capsys, "heights", "--curve", curves["e37"], "--point", "0")[0] == 1

    def test_sqrt_field_mismatch(self, capsys, curves):
        code, _, err = run(
            capsys, "heights", "--curve", curves["e37"],
            "--point", "3,-1/2+1/2*sqrt(97)", "--d", "5",
        )
        assert code == 1 and "sqrt(97)" in err

    def test_off_curve_point(self, capsys, curves):
        code, _, err = run(
            capsys, "heights", "--curve", curves["e37"], "--point", "2,1"
        )
        assert code == 1 and "not on the curve" in err

    def test_bad_c1_mode(self, capsys, curves, tmp_path):
        code = run(
            capsys, "bound", "--curve", curves["e37"], "--c1", "bogus",
            "--out", str(tmp_path / "r.json"),
        )[0]
        assert code == 1


class TestHeights:
    def test_rational_decomposition(self, capsys, curves):
        code, out, _ = run(
            capsys, "heights", "--curve", curves["e37"], "--point", "0,0"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["pass"] is True
        assert payload["hhat"] == "0.025556"
        assert abs(float(payload["residual"])) < 1e-6
        assert payload["real_decimals"] == 6
        places = {e["place"]: e for e in payload["entries"]}
        assert places["37"]["method"] == "bad-nonsingular"
        assert places["37"]["weight"] == "1/1"

    def test_quadratic_decomposition(self, capsys, curves):
        code, out, _ = run(
            capsys, "heights", "--curve", curves["e37"],
            "--point", "3,-1/2+1/2*sqrt(97)", "--d", "97",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["pass"] is True
        assert payload["hhat"] == "0.593967"
        weights = [e["weight"] for e in payload["entries"] if "infinity" in e["place"]]
        assert weights == ["1/2", "1/2"]


class TestFrobenius:
    def test_spec_wire_format(self, capsys, curves):
        code, out, _ = run(
            capsys, "frobenius", "--curve", curves["e37"], "--p", "2",
            "--point", "0,0",
        )
        assert code == 0
        assert json.loads(out) == {
            "p": 2, "a": -2, "Np": 5, "kernel": True,
            "lambda": 0.693147, "bound": 0.693147,
        }

    def test_torsion_image_lambda_null(self, capsys, curves):
        code, out, _ = run(
            capsys, "frobenius", "--curve", curves["ecm"], "--p", "3",
            "--point", "0,0",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["kernel"] is True and payload["lambda"] is None

    def test_quadratic_point(self, capsys, curves):
        code, out, _ = run(
            capsys, "frobenius", "--curve", curves["e37"], "--p", "5",
            "--point", "3,-1/2+1/2*sqrt(97)",
        )
        assert code == 0
        assert json.loads(out)["lambda"] >= round(math.log(5), 6)

    def test_bad_reduction_is_usage_error(self, capsys, curves):
        code = run(
            capsys, "frobenius", "--curve", curves["e37"], "--p", "37",
            "--point", "0,0",
        )[0]
        assert code == 1


class TestFormal:
    def test_series_and_congruences(self, capsys, curves):
        code, out, _ = run(
            capsys, "formal", "--curve", curves["e37"], "--p", "2",
            "--series-degree", "8",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["mult_by_p"][:2] == ["0", "2"]
        assert payload["inversion"][1] == "-1"
        assert len(payload["mult_by_p"]) == 9
        assert payload["ideal_membership"] and payload["structure_ap_pb"]

    def test_degree_too_small(self, capsys, curves):
        code = run(
            capsys, "formal", "--curve", curves["e37"], "--p", "5",
            "--series-degree", "6",
        )[0]
        assert code == 1

    def test_composite_p(self, capsys, curves):
        code = run(
            capsys, "formal", "--curve", curves["e37"], "--p", "4",
            "--series-degree", "8",
        )[0]
        assert code == 1


class TestCongruence:
    def test_nine_three(self, capsys):
        code, out, _ = run(
            capsys, "congruence", "--m", "9", "--p", "3", "--samples", "25",
            "--seed", "7",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["all_pass"] is True
        assert payload["tau_exponent"] == 4
        assert payload["samples"] == 25
        assert payload["exhaustive_basis"] is True

    def test_twelve_two(self, capsys):
        code, out, _ = run(
            capsys, "congruence", "--m", "12", "--p", "2", "--samples", "10"
        )
        assert code == 0
        assert json.loads(out)["tau_exponent"] == 7

    def test_unramified_pair_rejected(self, capsys):
        assert run(capsys, "congruence", "--m", "6", "--p", "5")[0] == 1


class TestRamified:
    def test_anchor_point(self, capsys, curves):
        code, out, _ = run(
            capsys, "ramified", "--curve", curves["e37"], "--d", "481",
            "--x", "5", "--p", "13",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["outcome"] == "bound"
        assert payload["valuation"] == "3/1"
        assert payload["bound_met"] is True
        assert payload["lambda_lower"] == "3.847424"

    def test_pure_sqrt_point(self, capsys, curves):
        code, out, _ = run(
            capsys, "ramified", "--curve", curves["ecm"], "--d", "6",
            "--x", "2", "--p", "3",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["bound_met"] is True

    def test_x_not_in_field(self, capsys, curves):
        code, _, err = run(
            capsys, "ramified", "--curve", curves["e37"], "--d", "481",
            "--x", "4", "--p", "13",
        )
        assert code == 1 and "not quadratic" in err

    def test_unramified_prime_rejected(self, capsys, curves):
        code = run(
            capsys, "ramified", "--curve", curves["e37"], "--d", "481",
            "--x", "5", "--p", "7",
        )[0]
        assert code == 1


class TestBound:
    def test_cm_with_assertion(self, capsys, curves, tmp_path):
        out_path = str(tmp_path / "report.json")
        code, out, _ = run(
            capsys, "bound", "--curve", curves["ecm"], "--assert-condition-1",
            "--out", out_path,
        )
        assert code == 0
        summary = json.loads(out)
        assert summary["p"] == 7
        assert summary["C"] == "1/882"
        assert summary["violation_count"] == 0
        assert summary["out"] == out_path

        report = json.loads(open(out_path).read())
        assert report["selection"]["p"] == 7
        assert report["selection"]["conditions"]["torsion"]["status"] == "asserted"
        assert report["certificate"]["C_unramified"] == "1/234"
        assert report["certificate"]["C"] == "1/882"
        assert "condition-1-asserted" in report["certificate"]["caveats"]
        verification = report["verification"]
        assert verification["quadratic_fields"] == [-210, -6, 6, 210]
        assert verification["violation_count"] == 0
        assert len(verification["entries"]) == verification["corpus_size"]
        assert all(rec["ok"] for rec in verification["intermediate"])

    def test_cm_without_assertion_exits_two(self, capsys, curves, tmp_path):
        out_path = str(tmp_path / "report.json")
        code, out, _ = run(
            capsys, "bound", "--curve", curves["ecm"], "--max-p", "200",
            "--out", out_path,
        )
        assert code == 2
        assert "assert_condition_1" in json.loads(out)["error"]
        assert not os.path.exists(out_path)
