"""Tests for pyhopflink.cli — config parsing, validation, commands and exit codes."""

from __future__ import annotations

import argparse
import json
import math
import textwrap
from pathlib import Path
from typing import Any

import pytest

from pyhopflink import verify
from pyhopflink.cli import (
    DEFAULTS,
    EXIT_GEOMETRY,
    EXIT_INPUT,
    EXIT_VERIFY,
    _load_config,
    _merge_settings,
    _validate_config,
    main,
)
from pyhopflink.codec import Scene, link_from_json, scene_to_json
from pyhopflink.retraction import DeckElement, g_act
from pyhopflink.roundlink import OrientedRoundHopfLink, RoundCircle, reverse_component
from tests.fixtures import (
    BASEPOINT,
    basepoint_scene,
    circles_doc,
    finger_mesh,
    link_doc,
    split_link,
    tangent_link,
    write_json,
)

# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

NESTED_PATTERN = {
    "points": [{"index": i, "sign": s} for i, s in enumerate(["+", "+", "-", "-", "+", "-"])],
    "chords": [[1, 4], [2, 3]],
    "alpha": [0, 5],
    "circles": [],
}


def _write_toml(tmp_path: Path, content: str) -> Path:
    p = tmp_path / "config.toml"
    p.write_text(textwrap.dedent(content))
    return p


def _namespace(**flags: Any) -> argparse.Namespace:
    base = {name: None for name in DEFAULTS}
    base.update(flags)
    return argparse.Namespace(**base)


def _run(capsys: pytest.CaptureFixture[str], *argv: str) -> str:
    main(list(argv))
    return capsys.readouterr().out


def _exit_code(*argv: str) -> int | str | None:
    with pytest.raises(SystemExit) as exc_info:
        main(list(argv))
    code = exc_info.value.code
    # sys.exit("message") exits with status 1
    return EXIT_INPUT if isinstance(code, str) else code


# ---------------------------------------------------------------------------
# _load_config
# ---------------------------------------------------------------------------


class TestLoadConfig:
    def test_missing_file(self) -> None:
        with pytest.raises(SystemExit, match="Config file not found"):
            _load_config("/nonexistent/config.toml")

    def test_malformed_toml(self, tmp_path: Path) -> None:
        p = _write_toml(tmp_path, "[[invalid\n")
        with pytest.raises(SystemExit, match="Failed to parse"):
            _load_config(str(p))

    def test_valid_toml(self, tmp_path: Path) -> None:
        p = _write_toml(
            tmp_path,
            """\
            [sampling]
            seed = 7
            n = 20
            """,
        )
        result = _load_config(str(p))
        assert result["sampling"]["seed"] == 7


# ---------------------------------------------------------------------------
# _merge_settings / _validate_config
# ---------------------------------------------------------------------------


class TestMergeSettings:
    def test_defaults(self) -> None:
        assert _merge_settings(_namespace(), {}) == DEFAULTS

    def test_file_overrides_defaults(self) -> None:
        values = _merge_settings(_namespace(), {"mesh": {"resolution": 32, "h_max": 3.0}})
        assert values["mesh_res"] == 32
        assert values["h_max"] == 3.0
        assert values["h_min"] == DEFAULTS["h_min"]

    def test_flags_override_file(self) -> None:
        values = _merge_settings(_namespace(seed=9), {"sampling": {"seed": 5, "n": 4}})
        assert values["seed"] == 9
        assert values["n"] == 4


class TestValidateConfig:
    def test_defaults_pass(self) -> None:
        assert _validate_config(dict(DEFAULTS)) == DEFAULTS

    def test_zero_samples(self) -> None:
        with pytest.raises(SystemExit, match="sampling.n"):
            _validate_config({**DEFAULTS, "n": 0})

    def test_negative_tolerance(self) -> None:
        with pytest.raises(SystemExit, match="tolerances.tol"):
            _validate_config({**DEFAULTS, "tol": -1e-9})

    def test_coarse_mesh(self) -> None:
        with pytest.raises(SystemExit, match="mesh.resolution"):
            _validate_config({**DEFAULTS, "mesh_res": 4})

    def test_decimals_range(self) -> None:
        with pytest.raises(SystemExit, match="output.decimals"):
            _validate_config({**DEFAULTS, "decimals": 20})

    def test_height_order(self) -> None:
        with pytest.raises(SystemExit, match="0 < h_min < h_max"):
            _validate_config({**DEFAULTS, "h_min": 2.0, "h_max": 1.0})

    def test_bool_is_not_an_integer(self) -> None:
        with pytest.raises(SystemExit, match="sampling.seed"):
            _validate_config({**DEFAULTS, "seed": True})

    def test_multiple_errors_reported(self) -> None:
        """All validation errors should be reported at once."""
        with pytest.raises(SystemExit, match="sampling.n") as exc_info:
            _validate_config({**DEFAULTS, "n": 0, "mesh_res": 2, "h_min": "low"})
        msg = str(exc_info.value)
        assert "mesh.resolution" in msg
        assert "mesh.h_min and mesh.h_max must be numbers" in msg


# ---------------------------------------------------------------------------
# Link commands
# ---------------------------------------------------------------------------


class TestLinkCommands:
    def test_lk_basepoint(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = write_json(tmp_path, "link.json", link_doc())
        assert _run(capsys, "lk", str(path)) == "+1\n"

    def test_lk_reversed(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = write_json(tmp_path, "link.json", link_doc(reverse_component(BASEPOINT, 0)))
        assert _run(capsys, "lk", str(path)) == "-1\n"

    def test_lk_split(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = write_json(tmp_path, "split.json", circles_doc(*split_link()))
        assert _run(capsys, "lk", str(path)) == "0\n"

    @pytest.mark.parametrize("method", ["gauss", "crossing"])
    def test_lk_polygon_methods(
        self, method: str, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        path = write_json(tmp_path, "link.json", link_doc())
        assert _run(capsys, "lk", str(path), "--method", method) == "+1\n"

    def test_lk_tangent_is_geometric_error(
        self, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        path = write_json(tmp_path, "tangent.json", circles_doc(*tangent_link()))
        assert _exit_code("lk", str(path)) == EXIT_GEOMETRY
        assert capsys.readouterr().err.startswith("Error: ")

    def test_canon_basepoint(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = write_json(tmp_path, "link.json", link_doc())
        doc = json.loads(_run(capsys, "canon", str(path)))
        assert doc == {"quaternion": [0.707106781, 0.0, 0.0, 0.707106781]}

    def test_canon_is_deck_invariant(
        self, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        base = write_json(tmp_path, "base.json", link_doc())
        acted = write_json(tmp_path, "acted.json", link_doc(g_act(DeckElement.ALPHA, BASEPOINT)))
        assert _run(capsys, "canon", str(base)) == _run(capsys, "canon", str(acted))

    def test_canon_obtuse_dihedral(
        self, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        theta = 2 * math.pi / 3
        obtuse = OrientedRoundHopfLink(
            BASEPOINT.first,
            RoundCircle((1.0, 0.0, 0.0), 1.0, (0.0, math.sin(theta), math.cos(theta))),
        )
        base = write_json(tmp_path, "obtuse.json", link_doc(obtuse))
        acted = write_json(tmp_path, "acted.json", link_doc(g_act(DeckElement.S, obtuse)))
        first = _run(capsys, "canon", str(base))
        assert len(json.loads(first)["quaternion"]) == 4
        assert _run(capsys, "canon", str(acted)) == first
        frames = [json.loads(line) for line in _run(capsys, "frames", str(base)).splitlines()]
        assert frames[-1]["in_Y"]

    def test_canon_unlinked(self, tmp_path: Path) -> None:
        path = write_json(tmp_path, "split.json", circles_doc(*split_link()))
        assert _exit_code("canon", str(path)) == EXIT_GEOMETRY

    def test_malformed_json(self, tmp_path: Path) -> None:
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(SystemExit, match="Error: "):
            main(["canon", str(path)])

    def test_missing_input(self) -> None:
        assert _exit_code("canon", "/nonexistent/link.json") == EXIT_INPUT

    def test_structurally_bad_link(self, tmp_path: Path) -> None:
        path = write_json(tmp_path, "link.json", {"components": []})
        with pytest.raises(SystemExit, match="exactly two"):
            main(["canon", str(path)])

    def test_retract(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = write_json(tmp_path, "link.json", link_doc())
        doc = json.loads(_run(capsys, "retract", str(path)))
        assert link_from_json(doc["link"]) == BASEPOINT
        assert doc["frame"]["matrix"] == [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]

    def test_frames(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = write_json(tmp_path, "link.json", link_doc())
        records = [json.loads(line) for line in _run(capsys, "frames", str(path)).splitlines()]
        assert [r["index"] for r in records] == [0, 1, 2, 3, 4]
        assert records[-1]["stage"] == "center_arc_endpoints"
        assert all(r["in_Y"] for r in records)
        assert len({json.dumps(r["link"]) for r in records}) == 1

    def test_out_file(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = write_json(tmp_path, "link.json", link_doc())
        out = tmp_path / "canon.json"
        assert _run(capsys, "canon", str(path), "--out", str(out)) == ""
        assert json.loads(out.read_text())["quaternion"][0] == 0.707106781

    def test_decimals_from_config(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = write_json(tmp_path, "link.json", link_doc())
        config = _write_toml(
            tmp_path,
            """\
            [output]
            decimals = 3
            """,
        )
        doc = json.loads(_run(capsys, "canon", str(path), "--config", str(config)))
        assert doc == {"quaternion": [0.707, 0.0, 0.0, 0.707]}


# ---------------------------------------------------------------------------
# Pattern commands
# ---------------------------------------------------------------------------


class TestPatternCommands:
    def test_pattern_basepoint(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = write_json(tmp_path, "scene.json", scene_to_json(basepoint_scene(32)))
        doc = json.loads(_run(capsys, "pattern", str(path)))
        assert 0.5 <= doc["h"] <= 2.0
        assert doc["pattern"]["chords"] == []
        assert len(doc["pattern"]["points"]) == 2

    def test_generated_mesh_uses_mesh_res(
        self, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        scene = {
            "disc_mesh": {"circle": link_doc()["components"][1]},
            "equator": link_doc()["components"][0],
        }
        path = write_json(tmp_path, "scene.json", scene)
        doc = json.loads(_run(capsys, "pattern", str(path), "--mesh-res", "48"))
        assert doc["pattern"]["alpha"] == [0, 1]

    def test_schedule_basepoint_is_empty(
        self, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        path = write_json(tmp_path, "scene.json", scene_to_json(basepoint_scene(32)))
        doc = json.loads(_run(capsys, "schedule", str(path)))
        assert doc["schedule"]["entries"] == []
        assert doc["final"]["alpha"] == [0, 1]
        assert doc["directive"]["steps"] == 0

    def test_schedule_finger_removes_one_chord(
        self, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        scene = Scene(finger_mesh(64), BASEPOINT.first, (0.9, 1.1))
        path = write_json(tmp_path, "finger.json", scene_to_json(scene))
        doc = json.loads(_run(capsys, "schedule", str(path)))
        assert len(doc["schedule"]["entries"]) == 1
        assert doc["directive"]["steps"] == 1
        assert len(doc["final"]["points"]) == 2

    def test_schedule_pattern_document(
        self, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        path = write_json(tmp_path, "pattern.json", NESTED_PATTERN)
        doc = json.loads(_run(capsys, "schedule", str(path)))
        assert "h" not in doc
        assert [e["chord"] for e in doc["schedule"]["entries"]] == [[2, 3], [1, 4]]
        assert doc["directive"] == {
            "alpha": [0, 5],
            "target": "poles-axis",
            "steps": 2,
            "discarded_circles": 0,
        }

    def test_crossing_pattern_is_input_error(self, tmp_path: Path) -> None:
        doc = {
            "points": [{"index": i, "sign": s} for i, s in enumerate("+++-")],
            "chords": [[0, 2]],
            "alpha": [1, 3],
        }
        path = write_json(tmp_path, "pattern.json", doc)
        with pytest.raises(SystemExit, match="cross"):
            main(["schedule", str(path)])

    def test_far_disc_has_no_mixed_chord(self, tmp_path: Path) -> None:
        far = {"center": [10.0, 0.0, 0.0], "radius": 1.0, "normal": [0.0, 1.0, 0.0]}
        equator = link_doc()["components"][0]
        scene = {"disc_mesh": {"circle": far, "resolution": 16}, "equator": equator}
        path = write_json(tmp_path, "scene.json", scene)
        assert _exit_code("schedule", str(path)) == EXIT_GEOMETRY


# ---------------------------------------------------------------------------
# Plane commands
# ---------------------------------------------------------------------------


class TestPlaneCommands:
    def test_xi(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = write_json(tmp_path, "plane.json", {"x": [1, 0, 0, 0], "y": [0, 1, 0, 0]})
        assert json.loads(_run(capsys, "xi", str(path))) == {
            "mu": [-1.0, 0.0, 0.0],
            "nu": [1.0, 0.0, 0.0],
        }

    def test_canon_s3(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = write_json(tmp_path, "plane.json", {"x": [1, 0, 0, 0], "y": [0, 1, 0, 0]})
        assert json.loads(_run(capsys, "canon-s3", str(path))) == {
            "first": [1.0, 0.0, 0.0],
            "second": [1.0, 0.0, 0.0],
        }

    def test_not_orthonormal(self, tmp_path: Path) -> None:
        path = write_json(tmp_path, "plane.json", {"x": [1, 0, 0, 0], "y": [1, 1, 0, 0]})
        assert _exit_code("xi", str(path)) == EXIT_GEOMETRY


# ---------------------------------------------------------------------------
# verify / sample / usage
# ---------------------------------------------------------------------------


class TestVerifyAndSample:
    def test_verify_selected_suite(self, capsys: pytest.CaptureFixture[str]) -> None:
        out = _run(capsys, "verify", "--suite", "scheduling", "--suite", "xi", "--n", "2")
        lines = out.splitlines()
        assert lines[0] == "seed=20240601 n=2"
        assert lines[1].startswith("PASS scheduling")
        assert lines[2].startswith("PASS xi")
        assert lines[-1] == "all suites passed"

    def test_verify_failure_exit_code(
        self, monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]
    ) -> None:
        monkeypatch.setattr(verify, "linking_number_round", lambda a, b, tol=1e-9: 0)
        assert _exit_code("verify", "--suite", "linking", "--n", "1") == EXIT_VERIFY
        assert "verification failed" in capsys.readouterr().out

    def test_verify_zero_samples(self) -> None:
        with pytest.raises(SystemExit, match="sampling.n"):
            main(["verify", "--n", "0"])

    def test_sample_is_seeded(self, capsys: pytest.CaptureFixture[str]) -> None:
        first = _run(capsys, "sample", "--n", "3", "--seed", "11")
        second = _run(capsys, "sample", "--n", "3", "--seed", "11")
        assert first == second
        links = [link_from_json(json.loads(line)) for line in first.splitlines()]
        assert len(links) == 3
        assert all(link.linking_number == 1 for link in links)

    def test_sample_seed_from_config(
        self, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        config = _write_toml(
            tmp_path,
            """\
            [sampling]
            seed = 11
            n = 3
            """,
        )
        from_file = _run(capsys, "sample", "--config", str(config))
        from_flags = _run(capsys, "sample", "--n", "3", "--seed", "11")
        assert from_file == from_flags

    def test_no_command(self, capsys: pytest.CaptureFixture[str]) -> None:
        assert _exit_code() == EXIT_INPUT
        assert "usage" in capsys.readouterr().out

    def test_unknown_flag(self) -> None:
        assert _exit_code("sample", "--bogus") == EXIT_INPUT

    def test_unknown_suite(self) -> None:
        assert _exit_code("verify", "--suite", "nope") == EXIT_INPUT
