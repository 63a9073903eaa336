import json

import pytest

from basketforge.cli import main

B66 = "{(3,6),(3,7),(2,5),(1,4),(1,6)};chi=1;p2=0"


def test_basket_eval(capsys):
    assert main(["basket", "eval", B66, "--pm", "2..12", "--k3"]) == 0
    out = capsys.readouterr().out
    assert "K3 = 1/420" in out
    assert "P_m\t0\t0\t1\t1\t1\t1\t1\t1\t2\t2\t3" in out


def test_basket_eval_artifacts(tmp_path):
    assert main(["basket", "eval", B66, "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "basket.json").read_text())
    assert doc["k3"] == "1/420" and doc["plurigenera"]["10"] == "2/1"
    assert (tmp_path / "basket.tsv").read_text().startswith("m\tP\n")
    assert json.loads((tmp_path / "basket.config.json").read_text())["basket"] == B66


def test_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["bounds", "tablea", "--out", str(d)]) == 0
    for name in ("tablea.json", "tablea.tsv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


@pytest.mark.parametrize("argv", [
    ["basket", "eval", "{(3,6),(3,7)"],
    ["basket", "eval", "{(1,2)};chi=x"],
    ["basket", "eval", B66, "--pm", "a..b"],
    ["bounds", "replay", "--m0", "4", "--ms", "4", "--type", "II"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2
    assert "error:" in capsys.readouterr().err


def test_unknown_flag():
    with pytest.raises(SystemExit) as e:
        main(["basket", "eval", B66, "--bogus"])
    assert e.value.code == 2


def test_cap_exhaustion(capsys):
    assert main(["pack", "explore", "{6x(1,2),4x(1,3),3x(1,4)};chi=3", "--cap-states", "3"]) == 2


def test_bounds_tablea_matches(capsys):
    assert main(["bounds", "tablea"]) == 0
    assert "5/2408" in capsys.readouterr().out


def test_bounds_tablea_mismatch(tmp_path, capsys):
    doc = {"m0": [2], "rows": {"III": ["1/4"]}}
    (tmp_path / "tablea.json").write_text(json.dumps(doc))
    assert main(["bounds", "tablea", "--fixtures", str(tmp_path)]) == 1
    assert "MISMATCH III m0=2" in capsys.readouterr().out


def test_bounds_replay(capsys):
    argv = ["bounds", "replay", "--type", "generic", "--m0", "18", "--p", "1", "--beta", "1/24", "--deg", "2",
            "--ms", "65,60,59,58"]
    assert main(argv) == 0
    out = capsys.readouterr().out
    assert "xi=2/29" in out and "least m with alpha > 2: 73" in out


def test_pack_explore(capsys):
    assert main(["pack", "explore", "{3x(1,2),2x(2,5),2x(1,3),(1,4)};chi=1", "--order", "5"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "6 positive descendants, 4 minimal"
    assert "1/420\t{2x(1,2),(3,7),(2,5),2x(1,3),(1,4)}" in out


def test_missing_fixtures(tmp_path):
    assert main(["bounds", "tablea", "--fixtures", str(tmp_path / "nowhere")]) == 2
