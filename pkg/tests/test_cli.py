import io
import json
import subprocess
import sys

import pytest

from topospeed.cli import run
from topospeed.demos import BUILTIN_MODELS, BUILTIN_TASKS
from topospeed.models import serialize_model
from topospeed.tasks import serialize_task


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code, text = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def payload(text):
    return json.loads(text.split("\nJSON\n", 1)[1])


def test_consensus_one_round_unsolvable():
    code, text, _ = call("solve", "--task", "consensus2", "--model", "waitfree2", "--t", "1")
    assert code == 0
    assert "STATUS solve UNSOLVABLE" in text
    assert payload(text)["data"]["status"]["solve"] == "UNSOLVABLE"


def test_solvable_run_reports_certificate():
    code, text, _ = call("solve", "--task", "fig2", "--model", "c3", "--t", "1",
                         "--mode", "name-aware", "--show-map")
    assert code == 0
    assert "STATUS certificate valid" in text
    assert "== decision map ==" in text


def test_failing_check_prints_witness():
    code, text, _ = call("check-checkability", "--task", "mis_c4", "--model", "c4")
    assert code == 0
    assert "STATUS edge FAILS" in text
    assert "output: [1:0, 2:0, 3:0, 4:0]" in text


def test_unknown_task_is_input_error():
    code, text, err = call("solve", "--task", "nope", "--model", "c3", "--t", "0")
    assert code == 2 and text == ""
    assert "neither a built-in task" in err


def test_process_count_mismatch():
    code, _, err = call("solve", "--task", "fig2", "--model", "waitfree2", "--t", "0")
    assert code == 2
    assert "3 processes" in err


def test_usage_errors_exit_two():
    with pytest.raises(SystemExit) as exc:
        call("solve", "--task", "fig2", "--model", "c3", "--t", "-1")
    assert exc.value.code == 2


def test_budget_exhaustion_keeps_partial_report():
    code, text, _ = call("speedup", "--task", "twostar", "--model", "twostar3")
    assert code == 3
    assert "STATUS analysis BUDGET_EXCEEDED" in text
    assert "input task:twostar sha256=" in text
    assert "RESULT" not in text


def test_iterate_reports_each_step():
    code, text, _ = call("iterate", "--task", "renaming2", "--model", "waitfree2", "--r", "2")
    assert code == 3
    assert "STATUS step 0 BUILT facets=432" in text
    assert "STATUS step 1 BUDGET_EXCEEDED" in text


def test_file_inputs_hash_like_builtins(tmp_path):
    tf = tmp_path / "fig2.task"
    mf = tmp_path / "c3.model"
    tf.write_text(serialize_task(BUILTIN_TASKS["fig2"]()))
    mf.write_text(serialize_model(BUILTIN_MODELS["c3"]()))
    _, by_name, _ = call("check-independence", "--task", "fig2", "--model", "c3", "--t", "1")
    _, by_file, _ = call("check-independence", "--task", str(tf), "--model", str(mf), "--t", "1")
    hashes = lambda text: sorted(payload(text)["inputs"].values())
    assert hashes(by_name) == hashes(by_file)
    assert "STATUS independence FAILS" in by_file


def test_malformed_file_is_input_error(tmp_path):
    bad = tmp_path / "bad.task"
    bad.write_text("this is not a task\n")
    code, _, err = call("solve", "--task", str(bad), "--model", "c3", "--t", "0")
    assert code == 2 and err.startswith("error:")


def test_out_file_matches_stdout(tmp_path):
    target = tmp_path / "report.txt"
    code, text, _ = call("demo", "fig2", "--out", str(target))
    assert code == 0
    assert target.read_text() == text
    assert "RESULT OK" in text


@pytest.mark.parametrize("argv", [
    ["protocol", "--task", "consensus2", "--model", "waitfree2", "--t", "1", "--compact"],
    ["transform-ld", "--task", "mis_path5", "--model", "path5"],
    ["verify-pair", "--task", "trivial2", "--model", "waitfree2", "--t-max", "1"],
    ["speedup", "--task", "fig2", "--model", "c3", "--tables"],
])
def test_subcommands_complete(argv):
    code, text, _ = call(*argv)
    assert code == 0
    assert text == call(*argv)[1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "topospeed", "demo", "ld-transform"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "RESULT OK" in proc.stdout
