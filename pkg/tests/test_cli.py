import json
from fractions import Fraction as F
from pathlib import Path
import subprocess
import sys

import pytest

from countflow import cli
from countflow.core import Network

DATA = Path(__file__).parent / "data"
CORPUS = sorted(DATA.glob("*.json"))


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


class TestSpec:
    @pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.name)
    def test_round_trip(self, path):
        text = path.read_text()
        assert cli.emit_spec(cli.load_spec(text)) == text

    def test_one_edge(self):
        net = cli.parse_spec((DATA / "one_edge.json").read_text())
        assert isinstance(net, Network) and net.cap("(s,t)") == 5

    def test_builtin(self):
        fam = cli.parse_spec((DATA / "builtin_tree.json").read_text())
        assert fam.name == "counterexample63"

    def test_loop(self):
        text = json.dumps({"vertices": ["s", "t"], "edges": [{"from": "s", "to": "s", "cap": "1"}],
                           "source": "s", "sink": "t"})
        with pytest.raises(cli.SpecError, match="loop"):
            cli.parse_spec(text)

    def test_edge_into_source(self):
        text = json.dumps({"vertices": ["s", "t"], "edges": [{"from": "t", "to": "s", "cap": "1"}],
                           "source": "s", "sink": "t"})
        with pytest.raises(cli.SpecError):
            cli.parse_spec(text)

    def test_syntax_error_position(self):
        with pytest.raises(cli.SpecError, match="line 2, column"):
            cli.load_spec('{\n  "vertices": [,]\n}')

    def test_float_cap_rejected(self):
        text = json.dumps({"vertices": ["s", "t"], "edges": [{"from": "s", "to": "t", "cap": 1.5}],
                           "source": "s", "sink": "t"})
        with pytest.raises(cli.SpecError, match="p/q"):
            cli.load_spec(text)

    def test_parallel_ids(self):
        spec = cli.NetworkSpec("finite", ["s", "t"], [("s", "t", "1"), ("s", "t", "2")], "s", "t")
        assert spec.edge_ids() == ["(s,t)", "(s,t)#2"]


class TestRun:
    def test_solve(self):
        res = cli.run("solve", (DATA / "one_edge.json").read_text())
        assert res.lines[0] == "value: 5" and res.code == 0

    def test_cut_tree(self):
        res = cli.run("cut", "builtin:counterexample63", iterations=4)
        assert res.lines[0].startswith("cut: ") and res.lines[1].startswith("capacity: ")

    def test_sigma_w(self):
        assert cli.run("sigma-w", "builtin:siw73", radius=3).lines == ["bounds: 1/2, 1/4, 1/8"]

    def test_decompose(self):
        res = cli.run("decompose", (DATA / "diamond.json").read_text())
        assert res.lines[1] == "value: 9/4"

    def test_web(self):
        res = cli.run("web", (DATA / "one_edge.json").read_text())
        assert res.lines[:2] == ["web vertices: 1", "web edges: 0"]

    def test_wave_and_linkage(self):
        text = (DATA / "diamond.json").read_text()
        assert cli.run("wave", text).lines[2] == "separating: yes"
        assert cli.run("linkage", text).lines[0] in ("linkable: yes", "linkable: no")

    def test_ends(self):
        assert cli.run("ends-fcr", "builtin:double_ray_circulation").code == 1
        assert cli.run("ends-fcr", "builtin:ladder_wcr", radius=10).code == 0
        res = cli.run("ends-scr", "builtin:no_finite_path")
        assert res.code == 1 and res.lines[-1] == "witness: a-ray 1 <= 0"

    def test_ends_approx(self):
        res = cli.run("ends-approx", "builtin:ladder_wcr", iterations=4)
        assert res.lines[0] == "sigma: 1, 1, 1, 1"

    def test_dot(self):
        res = cli.run("solve", (DATA / "diamond.json").read_text())
        assert res.dot.startswith("digraph") and '"s" -> "a" [label="1/2/1/2"' in res.dot
        assert "style=dashed" in res.dot

    def test_dot_contracted(self):
        res = cli.run("solve", "builtin:double_ray_circulation", radius=1, mode="contract")
        assert "shape=box" in res.dot


class TestMain:
    def test_verify_flow_exit_codes(self, tmp_path, capsys):
        spec = str(DATA / "one_edge.json")
        good = write(tmp_path, "good.json", {"(s,t)": "3"})
        bad = write(tmp_path, "bad.json", {"(s,t)": "6"})
        assert cli.main(["verify-flow", spec, "--flow", good]) == 0
        assert cli.main(["verify-flow", spec, "--flow", bad]) == 1
        assert "capacity violation" in capsys.readouterr().out

    def test_verify_orthogonal(self, tmp_path):
        spec = str(DATA / "one_edge.json")
        f = write(tmp_path, "f.json", {"(s,t)": "5"})
        g = write(tmp_path, "g.json", {"(s,t)": "4"})
        cuts = write(tmp_path, "cuts.json", [["s"]])
        assert cli.main(["verify-orthogonal", spec]) == 0
        assert cli.main(["verify-orthogonal", spec, "--flow", f, "--cuts", cuts]) == 0
        assert cli.main(["verify-orthogonal", spec, "--flow", g, "--cuts", cuts]) == 1

    def test_usage_errors(self, tmp_path):
        assert cli.main(["solve", str(tmp_path / "missing.json")]) == 2
        assert cli.main(["solve", "builtin:nope"]) == 2
        assert cli.main(["verify-flow", str(DATA / "one_edge.json")]) == 2
        with pytest.raises(SystemExit) as exc:
            cli.main(["fly", "builtin:siw73"])
        assert exc.value.code == 2


    def test_dot_file(self, tmp_path):
        out = tmp_path / "g.dot"
        assert cli.main(["cut", str(DATA / "diamond.json"), "--dot", str(out)]) == 0
        assert out.read_text().startswith("digraph")

    def test_console_script(self):
        proc = subprocess.run([sys.executable, "-m", "countflow.cli", "sigma-w", "builtin:siw73"],
                              capture_output=True, text=True)
        assert proc.returncode == 0 and proc.stdout == "bounds: 1/2, 1/4, 1/8\n"


def test_size_error_exit_code():
    # the web of a large truncation is beyond the exhaustive wave search
    assert cli.main(["wave", "builtin:counterexample63", "--radius", "8"]) == 3
