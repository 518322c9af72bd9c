import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from unitsig.cli import SCHEMA, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, _ = call("--json", *argv)
    doc = json.loads(out)
    assert doc["schema"] == SCHEMA
    return code, doc


def test_unit_json():
    code, doc = call_json("unit", "145")
    assert code == 0
    assert doc["command"] == "unit" and doc["d"] == 145
    assert doc["epsilon"] == "12 + 1*sqrt(145)" and doc["norm"] == -1


def test_flags_after_subcommand():
    code, out, _ = call("unit", "82", "--json")
    assert code == 0 and json.loads(out)["epsilon"] == "9 + 1*sqrt(82)"


def test_primes_form():
    assert call_json("unit", "--primes", "5", "29")[1]["d"] == 145
    code, _, err = call("unit", "--primes", "5", "5")
    assert code == 2 and "distinct" in err


def test_m_command():
    code, out, _ = call("m", "7")
    assert code == 0 and "m = 2" in out


def test_analyze_text_and_json():
    code, out, _ = call("analyze", "3", "11")
    assert code == 0 and "rank 3, deficiency 1" in out and "(b)5" in out
    code, doc = call_json("analyze", "3", "11")
    assert doc["rank"] == 3 and doc["deficiency"] == 1


def test_json_is_deterministic():
    a = call("--json", "analyze", "3", "7", "11")[1]
    b = call("--json", "analyze", "3", "7", "11")[1]
    assert a == b


def test_timing_only_on_request():
    assert "seconds" not in call_json("unit", "5")[1]
    assert "seconds" in call_json("unit", "5", "--timing")[1]


def test_possible_m_command():
    code, doc = call_json("possible-m", "7", "11", "19", "23")
    assert code == 0 and doc["values"] == [77, 23, 1771]


def test_verify_exit_codes():
    assert call("verify", "q3mod4-pairs", "3", "7")[0] == 0
    assert call("verify", "rank3-n2+1", "1")[0] == 2
    # the octuple example does not meet its predicted rank (see unit group tests)
    assert call("verify", "octuple", "11", "67", "991", "47", "31", "7", "199", "19")[0] == 1


@pytest.mark.parametrize("argv", [["unit", "4"], ["unit", "1e3"], ["analyze", "6", "10", "15"],
                                  ["density", "--bound", "10"]])
def test_domain_errors(argv):
    code, _, err = call(*argv)
    assert code == 2 and err.startswith("error:")


def test_usage_error():
    assert call("no-such-command")[0] == 2


def test_enumerate_and_density():
    assert call_json("enumerate-configs")[1]["count"] == 14080
    doc = call_json("density", "--bound", "1000")[1]
    assert Fraction(doc["lo"]) < Fraction("0.6810") < Fraction(doc["hi"])


def test_search_csv(tmp_path):
    path = tmp_path / "hits.csv"
    code, doc = call_json("search", "rank4", "--bound", "30", "--limit", "3", "--csv", str(path))
    assert code == 0 and len(doc["results"]) == 3
    assert len(path.read_text().strip().splitlines()) == 4


def test_reproduction_harness_single_criterion():
    code, doc = call_json("verify-paper", "--section", "1")
    assert code == 0 and doc["criteria"][0]["passed"] and doc["total"] == 1


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "unitsig.cli", "unit", "145"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "12 + 1*sqrt(145)" in r.stdout


def test_symbolic_possible_m_shorthand():
    a = call_json("possible-m", "--n", "4", "--symbols", "+", "-", "-", "+", "+", "-")[1]
    b = call_json("possible-m", "--n", "4", "--symbols", "1", "-1", "-1", "+1", "1", "-1")[1]
    assert a == b and a["candidates"]
