"""Scan CLI: exit codes, report formats, and the figures report path."""

import io
import json
import shutil

import jsonschema
import pytest

from mailguard.cli import (
    EXIT_ALL_SAFE,
    EXIT_ERROR,
    EXIT_PHISHING_FOUND,
    CliInvocation,
    build_parser,
    run_scan_command,
)

from conftest import FIXTURES

# The canonical line schema for --format json output.
REPORT_SCHEMA = {
    "type": "object",
    "required": [
        "message_label", "verdict", "advisory", "features",
        "findings", "warnings", "engine_version", "scanned_at",
    ],
    "additionalProperties": False,
    "properties": {
        "message_label": {"type": "string"},
        "verdict": {"enum": ["phishing_suspected", "safe"]},
        "advisory": {"enum": ["delete", "none"]},
        "features": {
            "type": "object",
            "required": ["visible_links", "invisible_links", "unmatching_urls"],
            "additionalProperties": False,
            "properties": {
                "visible_links": {"type": "integer", "minimum": 0},
                "invisible_links": {"type": "integer", "minimum": 0},
                "unmatching_urls": {"type": "integer", "minimum": 0},
            },
        },
        "findings": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "kind", "href", "anchor_text", "detail",
                    "node_path", "part_index", "affects_verdict",
                ],
                "additionalProperties": False,
                "properties": {
                    "kind": {"enum": [
                        "unmatching_url", "invisible_link", "ip_literal_host",
                        "long_hyperlink", "hidden_by_css",
                    ]},
                    "href": {"type": "string"},
                    "anchor_text": {"type": "string"},
                    "detail": {"type": "string"},
                    "node_path": {"type": "array", "items": {"type": "integer"}},
                    "part_index": {"type": "integer", "minimum": 0},
                    "affects_verdict": {"type": "boolean"},
                },
            },
        },
        "warnings": {"type": "array", "items": {"type": "string"}},
        "engine_version": {"type": "string"},
        "scanned_at": {
            "type": "string",
            "pattern": r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(\.\d+)?Z$",
        },
    },
}


def run(paths, **kwargs):
    out, err = io.StringIO(), io.StringIO()
    code = run_scan_command(CliInvocation(paths=[str(p) for p in paths], out=out, err=err, **kwargs))
    return code, out.getvalue(), err.getvalue()


class TestExitCodes:
    def test_benign_file_exits_zero(self):
        code, out, _ = run([FIXTURES / "benign_newsletter.eml"], format="json")
        assert code == EXIT_ALL_SAFE
        assert len(out.strip().splitlines()) == 1

    def test_mixed_directory_exits_two(self):
        code, out, _ = run([FIXTURES])
        assert code == EXIT_PHISHING_FOUND
        assert len(out.strip().splitlines()) >= 12

    def test_all_benign_directory_exits_zero(self, tmp_path):
        for name in ("benign_newsletter.eml", "benign_click_here.eml"):
            shutil.copy(FIXTURES / name, tmp_path / name)
        code, _, _ = run([tmp_path])
        assert code == EXIT_ALL_SAFE

    def test_missing_path_exits_one_with_diagnostic(self):
        code, _, err = run(["does/not/exist.eml"])
        assert code == EXIT_ERROR
        assert "does/not/exist.eml" in err

    def test_error_wins_over_phishing(self):
        code, out, err = run([FIXTURES / "phish_ip_literal.eml", "missing.eml"])
        assert code == EXIT_ERROR
        assert "missing.eml" in err
        assert out  # the good file was still scanned

    def test_empty_file_is_a_scan_error(self, tmp_path):
        empty = tmp_path / "empty.eml"
        empty.write_bytes(b"")
        code, _, err = run([empty])
        assert code == EXIT_ERROR
        assert "empty.eml" in err

    def test_out_of_range_threshold_rejected(self):
        code, _, err = run([FIXTURES], threshold=766)
        assert code == EXIT_ERROR
        assert "765" in err


class TestJsonOutput:
    def test_every_line_is_a_valid_report(self):
        code, out, _ = run([FIXTURES], format="json")
        lines = out.strip().splitlines()
        assert len(lines) == 12
        for line in lines:
            jsonschema.validate(json.loads(line), REPORT_SCHEMA)

    def test_lexicographic_path_order(self):
        _, out, _ = run([FIXTURES], format="json")
        labels = [json.loads(line)["message_label"] for line in out.strip().splitlines()]
        assert labels == sorted(labels)

    def test_threshold_flag_changes_verdict(self):
        path = FIXTURES / "benign_difference_500.eml"
        code_default, _, _ = run([path], format="json")
        code_strict, out, _ = run([path], format="json", threshold=501)
        assert code_default == EXIT_ALL_SAFE
        assert code_strict == EXIT_PHISHING_FOUND
        assert json.loads(out)["verdict"] == "phishing_suspected"

    def test_long_limit_flag_flags_short_hrefs(self):
        path = FIXTURES / "benign_newsletter.eml"
        _, out, _ = run([path], format="json", long_limit=10)
        report = json.loads(out)
        kinds = {f["kind"] for f in report["findings"]}
        assert kinds == {"long_hyperlink"}
        assert report["verdict"] == "safe"

    def test_default_colors_are_configurable(self):
        # white default text makes an undeclared-color link on a white
        # default background invisible
        path = FIXTURES / "benign_click_here.eml"
        code, out, _ = run([path], format="json", default_foreground="white")
        assert code == EXIT_PHISHING_FOUND
        assert json.loads(out)["features"]["invisible_links"] == 1

    def test_unparseable_default_color_rejected(self):
        code, _, err = run([FIXTURES], default_background="chartreuse")
        assert code == EXIT_ERROR
        assert "chartreuse" in err


class TestTextOutput:
    def test_one_line_per_message_with_feature_counts(self):
        _, out, _ = run([FIXTURES / "phish_white_on_white.eml"])
        first = out.splitlines()[0]
        assert first.startswith("PHISHING_SUSPECTED")
        assert "(V=1 I=1 U=0)" in first

    def test_findings_indented_under_the_message(self):
        _, out, _ = run([FIXTURES / "phish_unmatching_host.eml"])
        lines = out.splitlines()
        assert any(line.startswith("    [unmatching_url]") for line in lines)


class TestRecursive:
    def test_non_recursive_skips_subdirectories(self, tmp_path):
        nested = tmp_path / "sub"
        nested.mkdir()
        shutil.copy(FIXTURES / "benign_newsletter.eml", nested / "deep.eml")
        code, out, _ = run([tmp_path], format="json")
        assert out.strip() == ""
        code, out, _ = run([tmp_path], format="json", recursive=True)
        assert len(out.strip().splitlines()) == 1


class TestParserDefaults:
    def test_env_var_overrides_default_flag_overrides_env(self, monkeypatch):
        parser = build_parser()
        args = parser.parse_args(["scan", "x.eml"])
        assert args.threshold == 500

        monkeypatch.setenv("MAILGUARD_THRESHOLD", "321")
        args = build_parser().parse_args(["scan", "x.eml"])
        assert args.threshold == 321

        args = build_parser().parse_args(["scan", "x.eml", "--threshold", "77"])
        assert args.threshold == 77

    def test_bad_env_value_falls_back(self, monkeypatch, capsys):
        monkeypatch.setenv("MAILGUARD_THRESHOLD", "not-a-number")
        args = build_parser().parse_args(["scan", "x.eml"])
        assert args.threshold == 500


class TestFigures:
    def test_figures_rendered_alongside_reports(self, tmp_path):
        figures = tmp_path / "figs"
        code, out, err = run([FIXTURES], format="json", figures_dir=str(figures))
        assert code == EXIT_PHISHING_FOUND
        assert len(out.strip().splitlines()) == 12
        written = sorted(p.name for p in figures.glob("*.png"))
        assert written == ["finding_kinds.png", "message_features.png", "verdicts.png"]
        for png in figures.glob("*.png"):
            assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
