import io
import subprocess
import sys
from pathlib import Path

import pytest

from paritytrace.cli import run

HERE = Path(__file__).parent
FIX = HERE / "fixtures"
GOLDEN = HERE / "golden"

# name -> (argv, exit status); the expected stdout lives in golden/<name>.out
CASES = {
    "check_coin": (["check", "coin.aut"], 0),
    "check_badmass": (["check", "badmass.aut"], 2),
    "empty_a1": (["empty", "a1.aut"], 0),
    "empty_aloop": (["empty", "aloop.aut"], 0),
    "member_a1_aomega": (["member", "a1.aut", "aomega.tree"], 0),
    "member_a1_ab": (["member", "a1.aut", "ab.tree"], 0),
    "accept_states_a1": (["accept-states", "a1.aut"], 0),
    "accept_states_aloop": (["accept-states", "aloop.aut"], 0),
    "accprob_coin": (["accprob", "coin.aut", "--tol", "1e-9"], 0),
    "accprob_three": (["accprob", "three.aut"], 0),
    "accprob_branching": (["accprob", "branching.aut"], 0),
    "accprob_unconverged": (["accprob", "halfloop.aut", "--max-iters", "5"], 3),
    "nodiv_m1": (["nodiv", "m1.aut"], 0),
    "nodiv_halfloop": (["nodiv", "halfloop.aut"], 0),
    "cyl_tree_coin": (["cyl-tree", "coin.aut", "hd(*)"], 0),
    "cyl_tree_file": (["cyl-tree", "coin.aut", "hd.tree"], 0),
    "cyl_tree_m1_start": (["cyl-tree", "m1.aut", "a(*)", "--start", "x1"], 0),
    "cyl_run_coin": (["cyl-run", "coin.aut", "hd.run", "--start", "x"], 0),
    "cyl_run_term": (["cyl-run", "coin.aut", "*@x", "--start", "x"], 0),
    "total_three": (["total", "three.aut"], 0),
    "total_coin_odd": (["total", "coin_odd.aut"], 0),
    "oracle_bscc_m1": (["oracle-bscc", "m1.aut"], 0),
    "oracle_bscc_three": (["oracle-bscc", "three.aut"], 0),
    "oracle_member_a1_ab": (["oracle-member", "a1.aut", "ab.tree"], 0),
    "oracle_member_t1": (["oracle-member", "t1.aut", "ok.tree"], 0),
    "mc_coin": (["mc", "coin.aut", "hd(*)", "--samples", "20000", "--seed", "3"], 0),
    "mc_halfloop": (["mc", "halfloop.aut", "a(*)", "--samples", "5000", "--seed", "1"], 0),
}


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(FIX / a) if (FIX / a).is_file() else a for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    argv, status = CASES[name]
    code, out, _ = invoke(argv)
    assert code == status
    assert out == (GOLDEN / f"{name}.out").read_text()


@pytest.mark.parametrize("name", ["mc_coin", "accprob_branching", "oracle_bscc_m1"])
def test_output_is_repeatable(name):
    argv, _ = CASES[name]
    assert invoke(argv) == invoke(argv)


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate", "coin.aut"],
    ["accprob", "coin.aut", "--bogus"],
    ["accprob", "coin.aut", "--tol", "0"],
    ["accprob", "coin.aut", "--tol", "abc"],
    ["mc", "coin.aut", "hd(*)", "--samples", "0"],
    ["member", "a1.aut"],
])
def test_usage_errors_exit_1(argv):
    code, out, err = invoke(argv)
    assert code == 1
    assert out == "" and err


@pytest.mark.parametrize("argv", [
    ["empty", "coin.aut"],
    ["accprob", "a1.aut"],
    ["nodiv", "badmass.aut"],
    ["check", "syntax.aut"],
    ["accprob", "missing-file.aut"],
    ["cyl-tree", "coin.aut", "hd(*,*)"],
    ["cyl-tree", "coin.aut", "hd(*"],
    ["cyl-run", "coin.aut", "hd@x(*@nope)"],
    ["cyl-tree", "coin.aut", "hd(*)", "--start", "nope"],
    ["oracle-bscc", "branching.aut"],
    ["member", "a1.aut", "hd.run"],
])
def test_invalid_input_exits_2(argv):
    code, out, err = invoke(argv)
    assert code == 2
    assert err


def test_unconverged_prefix_and_stderr_note():
    code, out, err = invoke(CASES["accprob_unconverged"][0])
    assert code == 3
    assert out.startswith("UNCONVERGED x ")
    assert "max-iters" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "paritytrace.cli", "empty", str(FIX / "a1.aut")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "nonempty true\n"
