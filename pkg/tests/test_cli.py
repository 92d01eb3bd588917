import json

import pytest

from pareto_preprocess.cli import build_parser, run_cli
from pareto_preprocess.core.preprocess import preprocess
from pareto_preprocess.core.reconstruct import RetrievalOracle, reconstruct
from pareto_preprocess.output.renderer import render_svg
from pareto_preprocess.utils.io import read_instance, write_model

from conftest import make_instance


@pytest.fixture
def i3_file(tmp_path, i3):
    path = tmp_path / "i3.json"
    write_model(str(path), i3)
    return str(path)


def test_gen_writes_a_readable_instance(tmp_path):
    out = tmp_path / "gen" / "inst.json"
    code = run_cli(
        ["gen", "--seed", "4", "--n", "9", "--mode", "staircase", "--out", str(out)]
    )
    assert code == 0
    inst = read_instance(str(out))
    assert len(inst.regions) == 9


def test_run_writes_report(tmp_path, i3_file):
    out = tmp_path / "run.json"
    assert run_cli(["run", "--instance", i3_file, "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["ledger"]["retrievals"] == 3
    assert report["tilde_size"] == 3
    assert report["cp"] == {"C": 10.0, "value": 30.0}
    assert [e["index"] for e in report["front"]] == [2, 3]


def test_run_honours_cost(tmp_path, i3_file):
    out = tmp_path / "run.json"
    assert run_cli(["run", "--instance", i3_file, "--cost", "2", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["cp"]["value"] == pytest.approx(6.0)


def test_preprocess_writes_aux(tmp_path, i3_file):
    out = tmp_path / "aux.json"
    assert run_cli(["preprocess", "--instance", i3_file, "--out", str(out)]) == 0
    aux = json.loads(out.read_text())
    assert aux["labels"] == {"A": "potential", "B": "potential", "C": "positive"}
    assert aux["truncated"]["flagged"] == [False, False, True, False, False]


def test_verify_passes_and_fails(tmp_path, i3_file):
    out = tmp_path / "verify.json"
    assert run_cli(["verify", "--instance", i3_file, "--out", str(out)]) == 0
    assert json.loads(out.read_text())["front_matches"] is True
    assert run_cli(["verify", "--instance", i3_file, "--ratios", "0.5,8"]) == 2


def test_verify_in_debug_mode(i3_file):
    assert run_cli(["verify", "--instance", i3_file, "--debug-assert"]) == 0


def test_bound_report(tmp_path, i3_file):
    out = tmp_path / "bound.json"
    assert run_cli(["bound", "--instance", i3_file, "--out", str(out)]) == 0
    bound = json.loads(out.read_text())
    assert bound["tilde"] == [1, 2, 3]
    assert bound["cp"] == pytest.approx(30.0)
    assert bound["retrieval_lb"] == 1
    assert bound["front_types"] == 3
    assert bound["ratios"] == {"retrieval": 8.0, "predicates": 8.0}


def test_bound_skips_front_types_on_large_instances(tmp_path):
    inst_path = tmp_path / "inst.json"
    out = tmp_path / "bound.json"
    assert run_cli(["gen", "--n", "12", "--out", str(inst_path)]) == 0
    assert run_cli(["bound", "--instance", str(inst_path), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["front_types"] is None


def test_invalid_instance_exit_code(tmp_path):
    path = tmp_path / "bad.json"
    bad = make_instance([("A", 0, 0, 2, 2), ("B", 1, 1, 3, 3)], [(0.5, 0.5), (2.5, 2.5)])
    write_model(str(path), bad)
    assert run_cli(["run", "--instance", str(path)]) == 1


def test_io_errors_exit_code(tmp_path):
    assert run_cli(["run", "--instance", str(tmp_path / "missing.json")]) == 3
    garbled = tmp_path / "garbled.json"
    garbled.write_text("{not json")
    assert run_cli(["run", "--instance", str(garbled)]) == 3


def test_missing_instance_flag_is_a_usage_error():
    with pytest.raises(SystemExit):
        run_cli(["run"])


def test_svg_scene(tmp_path, i3_file):
    out = tmp_path / "scene.svg"
    assert run_cli(["svg", "--instance", i3_file, "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("<svg")
    assert 'id="region-B"' in text


def test_render_svg_marks_flagged_regions(i3):
    aux = preprocess(i3.regions)
    front, _ = reconstruct(aux, RetrievalOracle(i3, aux.truncated))
    svg = render_svg(i3, aux, front)
    flagged = next(line for line in svg.splitlines() if 'id="region-B"' in line)
    assert "stroke-dasharray" in flagged
    assert render_svg(i3, aux, front) == svg


def test_bench_defaults_cover_two_to_the_ten_through_fourteen():
    args = build_parser("test").parse_args(["bench"])
    assert (args.min_exp, args.max_exp) == (10, 14)


def test_gen_gadget_layout(tmp_path):
    out = tmp_path / "gadgets.json"
    code = run_cli(
        ["gen", "--seed", "2", "--n", "12", "--mode", "gadget-figs", "--out", str(out)]
    )
    assert code == 0
    assert len(read_instance(str(out)).regions) == 12
