import json
from fractions import Fraction as F

import pytest

from floertorus.cli import RunConfig, build_parser, export_ainfty, main, run
from floertorus.config import ConfigError, load_setup
from floertorus.novikov import series_from_obj, series_repr

KONTSEVICH = """\
schema = 1

[base]
lift = ["0/1", "0/1"]

[prequantum]
m_amb = 1

[[lagrangian]]
direction = [0, 1]
offset = "0/1"
grading = 0
anchor_lift = ["0/1", "0/1"]

[[lagrangian]]
direction = [1, 0]
offset = "0/1"
grading = 0
anchor_lift = ["0/1", "0/1"]

[[lagrangian]]
direction = [1, -1]
offset = "0/1"
grading = 0
anchor_lift = ["0/1", "0/1"]
bundle_holonomy = "1/2"
rationalization_N = 2
"""

FOUR_LINES = """\
schema = 1

[base]
lift = [0, 0]

[[lagrangian]]
direction = [1, -1]
anchor_lift = [0, 0]

[[lagrangian]]
direction = [0, 1]
anchor_lift = [0, 0]

[[lagrangian]]
direction = [1, 1]
anchor_lift = [0, 0]

[[lagrangian]]
direction = [1, 0]
anchor_lift = [0, 0]
"""


@pytest.fixture
def kontsevich(tmp_path):
    path = tmp_path / "kontsevich.toml"
    path.write_text(KONTSEVICH)
    return str(path)


@pytest.fixture
def four_lines(tmp_path):
    path = tmp_path / "four.toml"
    path.write_text(FOUR_LINES)
    return str(path)


def rc(command, config=None, cutoff="8", anchored=True, n=None, **kw):
    return RunConfig(
        command=command,
        config_path=config,
        cutoff=F(cutoff),
        anchored=anchored,
        n=n,
        output=kw.get("output"),
        indices=kw.get("indices"),
        structure_path=kw.get("structure_path"),
        max_arity=kw.get("max_arity", 3),
    )


class TestConfig:
    def test_load(self, kontsevich):
        setup = load_setup(kontsevich)
        assert len(setup.lagrangians) == 3
        assert setup.m_amb == 1
        assert setup.lagrangians[2].bundle_holonomy == F(1, 2)

    def test_malformed_toml_reports_position(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text("[[lagrangian]\ndirection = [0, 1]\n")
        with pytest.raises(ConfigError) as err:
            load_setup(str(path))
        assert "line" in str(err.value)

    def test_bad_direction(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text('[[lagrangian]]\ndirection = [2, 4]\nanchor_lift = [0, 0]\n')
        with pytest.raises(ConfigError):
            load_setup(str(path))

    def test_anchor_off_line(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text(
            '[[lagrangian]]\ndirection = [0, 1]\noffset = "1/3"\nanchor_lift = [0, 0]\n'
        )
        with pytest.raises(ConfigError):
            load_setup(str(path))


class TestCommands:
    def test_intersections(self, kontsevich):
        status, doc = run(rc("intersections", kontsevich, indices=(0, 1)))
        assert status == 0
        assert doc["points"] == [["0/1", "0/1"]]

    def test_pair(self, kontsevich):
        status, doc = run(rc("pair", kontsevich, indices=(0, 1)))
        assert status == 0
        assert doc["generator"]["point"] == ["0/1", "0/1"]
        assert doc["spectrum"] == ["0/1"]

    def test_product_non_anchored_theta(self, kontsevich):
        status, doc = run(rc("product", kontsevich, cutoff="5", anchored=False))
        assert status == 0
        series = series_from_obj(doc["series"])
        assert series_repr(series) == "1 + 2*T^1/2 + 2*T^2 + 2*T^9/2"

    def test_product_anchored(self, kontsevich):
        status, doc = run(rc("product", kontsevich, cutoff="5"))
        assert status == 0
        assert len(doc["entries"]) == 1
        entry = doc["entries"][0]
        assert entry["coeff"]["terms"] == [
            {"lambda": "0/1", "mu": 0, "coeff": {"0": "1/1"}}
        ]

    def test_verify_passes(self, kontsevich):
        status, doc = run(rc("verify", kontsevich))
        assert status == 0
        assert all(s["fail"] == 0 for s in doc["suites"].values())

    def test_verify_four_lines(self, four_lines):
        status, doc = run(rc("verify", four_lines))
        assert status == 0
        assert doc["suites"]["ainfty_relation"]["pass"] == 1

    def test_reduce(self, kontsevich):
        status, doc = run(rc("reduce", kontsevich, n=2))
        assert status == 0
        assert all(entry["bs_n_rational"] for entry in doc["lagrangians"])
        assert doc["triples"] and all(t["in_lattice"] for t in doc["triples"])

    def test_galois(self, kontsevich):
        status, doc = run(rc("galois", kontsevich, cutoff="4", n=2))
        assert status == 0
        assert doc["ok"] and doc["twists_checked"] == 2

    def test_export_and_check_round_trip(self, four_lines, tmp_path):
        status, doc = run(rc("export-ainfty", four_lines))
        assert status == 0
        path = tmp_path / "structure.json"
        path.write_text(json.dumps(doc))
        status, check = run(rc("ainfty-check", structure_path=str(path)))
        assert status == 0
        assert check["residual_empty"] and check["filtration_ok"]

    def test_export_structure_shape(self, kontsevich):
        setup = load_setup(kontsevich)
        s = export_ainfty(setup, F(8))
        assert sorted(s.basis) == ["x1_0", "x2_0", "x2_1"]
        assert len(s.ops[2]) == 1

    def test_parallel_pair_is_input_error(self, tmp_path):
        path = tmp_path / "parallel.toml"
        path.write_text(
            "[[lagrangian]]\ndirection = [0, 1]\nanchor_lift = [0, 0]\n"
            '[[lagrangian]]\ndirection = [0, 1]\noffset = "1/2"\n'
            'anchor_lift = ["1/2", 0]\n'
        )
        assert main(["intersections", "--config", str(path)]) == 2

    def test_cutoff_must_be_positive(self, kontsevich):
        with pytest.raises(ValueError):
            run(rc("product", kontsevich, cutoff="0"))


class TestMainEntry:
    def test_json_output_is_deterministic(self, kontsevich, tmp_path, capsys):
        out1 = tmp_path / "a.json"
        out2 = tmp_path / "b.json"
        for out in (out1, out2):
            assert (
                main(
                    [
                        "product",
                        "--config",
                        kontsevich,
                        "--non-anchored",
                        "--cutoff",
                        "5",
                        "--json",
                        str(out),
                    ]
                )
                == 0
            )
        assert out1.read_text() == out2.read_text()

    def test_missing_config_is_exit_two(self, capsys):
        assert main(["pair", "--config", "/nonexistent.toml"]) == 2

    def test_thread_count_does_not_change_output(
        self, kontsevich, tmp_path, monkeypatch
    ):
        texts = []
        for threads in ("1", "4"):
            monkeypatch.setenv("FLOER_THREADS", threads)
            out = tmp_path / f"verify-{threads}.json"
            assert main(["verify", "--config", kontsevich, "--json", str(out)]) == 0
            texts.append(out.read_text())
        assert texts[0] == texts[1]

    def test_parser_lists_commands(self):
        parser = build_parser()
        text = parser.format_help()
        for name in ("product", "verify", "galois"):
            assert name in text

    def test_no_floats_in_output(self, kontsevich, tmp_path):
        out = tmp_path / "out.json"
        main(["verify", "--config", kontsevich, "--json", str(out)])
        data = out.read_text()

        def scan(node):
            assert not isinstance(node, float)
            if isinstance(node, dict):
                for k, v in node.items():
                    scan(k)
                    scan(v)
            elif isinstance(node, list):
                for v in node:
                    scan(v)

        scan(json.loads(data))
