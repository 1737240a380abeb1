"""End-to-end command-line interface tests.

Everything goes through cli.main(argv) with captured streams, so exit
codes, stdout payloads, and stderr diagnostics are all pinned here.
"""

import contextlib
import io
import json

import pytest

from iterhardy import cli

ONES = {
    "kind": "piecewise_power",
    "pieces": [{"from": 0.0, "to": None, "c": 1.0, "alpha": 0.0}],
}

FAST = ["--atoms", "17", "--grid-points", "129"]


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        rc = cli.main(argv)
    return rc, out.getvalue(), err.getvalue()


def r1_json():
    with open("specs/r1.json") as fh:
        return json.load(fh)


@pytest.fixture(scope="module")
def tmp_specs(tmp_path_factory):
    root = tmp_path_factory.mktemp("specs")
    r1 = r1_json()

    def dump(name, payload):
        path = root / name
        path.write_text(json.dumps(payload))
        return str(path)

    not_json = root / "not_json.json"
    not_json.write_text("{broken")
    degenerate = {"inequality": "3.1", "p": 1.0, "q": 1.0, "u": ONES, "v": ONES, "w": ONES}
    divergent = dict(degenerate, p=0.5, w=r1["w"])
    missing = {k: v for k, v in r1.items() if k != "w"}
    return {
        "degenerate": dump("degenerate.json", degenerate),
        "divergent": dump("divergent.json", divergent),
        "missing": dump("missing.json", missing),
        "sweep_p": dump(
            "sweep_p.json", {"spec": r1, "sweep": {"param": "p", "values": [0.5, 2.0]}}
        ),
        "sweep_tail": dump(
            "sweep_tail.json",
            {"spec": r1, "sweep": {"param": "w.pieces.1.alpha", "values": [-1.5, 1.0]}},
        ),
        "sweep_bad_path": dump(
            "sweep_bad_path.json",
            {"spec": r1, "sweep": {"param": "v.nosuch.alpha", "values": [1.0]}},
        ),
        "sweep_extra_key": dump(
            "sweep_extra_key.json",
            {"spec": r1, "sweep": {"param": "p", "values": [0.5]}, "extra": 1},
        ),
        "sweep_empty": dump(
            "sweep_empty.json", {"spec": r1, "sweep": {"param": "p", "values": []}}
        ),
        "not_json": str(not_json),
        "dir": str(root),
    }


@pytest.fixture(scope="module")
def verify_r1():
    rc, out, err = run(
        ["verify", "--spec", "specs/r1.json", "--atoms", "33", "--grid-points", "257"]
    )
    assert err == ""
    return rc, json.loads(out)


class TestComputeCondition:
    def test_reference_value(self):
        rc, out, err = run(["compute-condition", "--spec", "specs/r1.json"])
        assert rc == 0 and err == ""
        payload = json.loads(out)
        rep = payload["report"]
        assert rep["formula"] == "I1"
        assert abs(rep["value"] - 0.13499275884384815) <= 1e-9 * 0.135
        assert payload["config"]["window"] == [1e-8, 1e8]
        assert payload["config"]["spec"]["inequality"] == "3.1"

    def test_csv_format(self):
        rc, out, _ = run(
            ["compute-condition", "--spec", "specs/r1.json", "--format", "csv",
             "--grid-points", "129"]
        )
        assert rc == 0
        lines = out.splitlines()
        assert lines[0] == "formula,value,c_lo,ratio,error_est,warnings,error"
        cells = lines[1].split(",")
        assert cells[0] == "I1" and float(cells[1]) > 0
        # no oracle run in this subcommand
        assert cells[2] == "" and cells[3] == ""

    def test_window_flows_into_config(self):
        rc, out, _ = run(
            ["compute-condition", "--spec", "specs/r1.json", "--window", "1e-2:1e2",
             "--grid-points", "129"]
        )
        assert rc == 0
        assert json.loads(out)["config"]["window"] == [0.01, 100.0]

    def test_unmet_hypotheses_exit_2(self, tmp_specs):
        rc, out, _ = run(
            ["compute-condition", "--spec", tmp_specs["divergent"], "--grid-points", "129"]
        )
        assert rc == 2
        warnings = json.loads(out)["report"]["warnings"]
        assert any("limit not zero" in w for w in warnings)

    def test_out_file(self, tmp_specs, tmp_path):
        target = tmp_path / "report.json"
        rc, out, _ = run(
            ["compute-condition", "--spec", "specs/r1.json", "--out", str(target),
             "--grid-points", "129"]
        )
        assert rc == 0 and out == ""
        assert json.loads(target.read_text())["report"]["formula"] == "I1"


class TestVerify:
    def test_passes_on_reference_spec(self, verify_r1):
        rc, payload = verify_r1
        assert rc == 0
        assert payload["passed"] is True
        assert payload["bracket"] == [1.0, 50.0]
        assert 1.0 <= payload["ratio"] <= 50.0
        assert payload["hypotheses_unmet"] is False

    def test_oracle_section(self, verify_r1):
        _, payload = verify_r1
        est = payload["oracle"]
        assert est["c_lo"] > 0 and est["stable"] is True
        assert est["inequality"] == "3.1"

    def test_chain_section(self, verify_r1):
        _, payload = verify_r1
        chain = payload["chain"]
        assert sorted(chain["values"]) == ["A1", "A2", "A3", "A4", "A5"]
        for ratio in chain["adjacent_ratios"].values():
            assert 1.0 / 8.0 <= ratio <= 8.0

    def test_sequence_and_discrete_sections(self, verify_r1):
        _, payload = verify_r1
        assert payload["sequence"]["ok"] is True
        assert payload["sequence"]["failures"] == []
        assert set(payload["sequence"]["constants"]) == {
            "u_step_min", "phi_step_min", "ratio_step_max", "z1_flatness", "z2_flatness",
        }
        vs = payload["discrete"]["vs_condition"]
        assert 1.0 / 16.0 <= vs <= 16.0

    def test_narrow_bracket_fails_cleanly(self):
        rc, out, _ = run(
            ["verify", "--spec", "specs/r2.json", "--bracket", "49:50"] + FAST
        )
        payload = json.loads(out)
        assert rc == 0  # hypotheses hold; the band is a verdict, not an error
        assert payload["passed"] is False
        assert payload["chain"] is None  # sup-form spec has no 3.1 chain

    def test_bad_bracket(self):
        rc, _, err = run(["verify", "--spec", "specs/r1.json", "--bracket", "5"] + FAST)
        assert rc == 1 and "LO:HI" in err


class TestDiscretize:
    def test_round_trip(self):
        rc, out, err = run(["discretize", "--spec", "specs/r1.json", "--grid-points", "257"])
        assert rc == 0 and err == ""
        payload = json.loads(out)
        seq = payload["sequence"]
        assert seq["a"] == 2.0
        assert [sorted(k) for k in seq["knots"][:1]] == [["k", "label", "x"]]
        ks = [k["k"] for k in seq["knots"]]
        assert ks == sorted(ks)
        assert payload["verification"]["ok"] is True
        assert payload["discrete_condition"]["value"] > 0

    def test_ratio_below_two(self):
        rc, _, err = run(["discretize", "--spec", "specs/r1.json", "--ratio", "1.5"])
        assert rc == 1
        assert "a must be >= 2 (step ratio --ratio)" in err

    def test_wrong_family(self):
        rc, _, err = run(["discretize", "--spec", "specs/r4.json"])
        assert rc == 1 and "3.x family" in err

    def test_degenerate_exit_2(self, tmp_specs):
        rc, out, _ = run(
            ["discretize", "--spec", tmp_specs["degenerate"], "--grid-points", "257"]
        )
        assert rc == 2
        assert json.loads(out)["error"] == "degenerate function: phi is infinite on the window"


class TestSweep:
    def test_regime_flip_csv(self, tmp_specs):
        rc, out, err = run(["sweep", "--spec", tmp_specs["sweep_p"]] + FAST)
        assert rc == 0 and err == ""
        lines = out.splitlines()
        assert lines[0] == "p,formula,value,c_lo,ratio,error_est,warnings,error"
        rows = [line.split(",") for line in lines[1:]]
        assert [r[0] for r in rows] == ["0.5", "2.0"]
        assert [r[1] for r in rows] == ["I1", "I3"]
        for r in rows:
            assert float(r[3]) > 0 and r[-1] == ""

    def test_inf_nan_literals(self, tmp_specs):
        rc, out, _ = run(["sweep", "--spec", tmp_specs["sweep_tail"]] + FAST)
        assert rc == 0
        divergent_row = out.splitlines()[2].split(",")
        assert divergent_row[2] == "inf"
        assert divergent_row[4] == "nan"

    def test_json_format(self, tmp_specs):
        rc, out, _ = run(
            ["sweep", "--spec", tmp_specs["sweep_empty"], "--format", "json"] + FAST
        )
        assert rc == 0
        payload = json.loads(out)
        assert payload["param"] == "p" and payload["rows"] == []

    def test_empty_values_header_only(self, tmp_specs):
        rc, out, _ = run(["sweep", "--spec", tmp_specs["sweep_empty"]] + FAST)
        assert rc == 0
        assert out == "p,formula,value,c_lo,ratio,error_est,warnings,error\n"

    def test_bad_dotted_path(self, tmp_specs):
        rc, _, err = run(["sweep", "--spec", tmp_specs["sweep_bad_path"]] + FAST)
        assert rc == 1 and "no field 'nosuch'" in err

    def test_schema_enforced(self, tmp_specs):
        rc, _, err = run(["sweep", "--spec", tmp_specs["sweep_extra_key"]] + FAST)
        assert rc == 1 and "'spec' and 'sweep'" in err


class TestBadInput:
    def test_missing_file(self):
        rc, _, err = run(["compute-condition", "--spec", "/nonexistent.json"])
        assert rc == 1 and "cannot read spec file" in err

    def test_malformed_json(self, tmp_specs):
        rc, _, err = run(["compute-condition", "--spec", tmp_specs["not_json"]])
        assert rc == 1 and "malformed JSON" in err

    def test_missing_spec_field(self, tmp_specs):
        rc, _, err = run(["compute-condition", "--spec", tmp_specs["missing"]])
        assert rc == 1 and "invalid spec" in err and "'w'" in err

    @pytest.mark.parametrize("window", ["abc", "5", "2:1", "0:1", "1:inf"])
    def test_bad_window(self, window):
        rc, _, err = run(
            ["compute-condition", "--spec", "specs/r1.json", "--window", window]
        )
        assert rc == 1 and "--window" in err

    def test_grid_points_floor(self):
        rc, _, err = run(["compute-condition", "--spec", "specs/r1.json",
                          "--grid-points", "8"])
        assert rc == 1 and "at least 16" in err

    def test_atoms_floor(self):
        rc, _, err = run(["verify", "--spec", "specs/r1.json", "--atoms", "5"])
        assert rc == 1 and "at least 9" in err

    def test_usage_errors_map_to_1(self):
        assert run([])[0] == 1
        assert run(["no-such-command"])[0] == 1
        assert run(["compute-condition"])[0] == 1  # --spec is required

    def test_help_exits_0(self):
        with contextlib.redirect_stdout(io.StringIO()):
            assert cli.main(["--help"]) == 0


class TestDeterminism:
    def test_compute_condition_bytes(self):
        first = run(["compute-condition", "--spec", "specs/r3.json", "--grid-points", "257"])
        second = run(["compute-condition", "--spec", "specs/r3.json", "--grid-points", "257"])
        assert first == second

    def test_sweep_bytes(self, tmp_specs):
        argv = ["sweep", "--spec", tmp_specs["sweep_p"]] + FAST
        assert run(argv) == run(argv)
