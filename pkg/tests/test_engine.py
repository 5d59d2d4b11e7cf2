"""Feature extraction across parts, the verdict rule, and whole-message scans."""

import json
import random

import pytest

from mailguard.engine import (
    Advisory,
    LinkFeatures,
    ScanConfig,
    ScanReport,
    Verdict,
    VerdictLabel,
    classify,
    extract_features,
    scan,
)
from mailguard.ingest import ParsedEmail, RawMessage
from mailguard.urls import FindingKind
from mailguard.visibility import VisibilityPolicy

from conftest import BENIGN_FIXTURES, PHISHING_FIXTURES, load_fixture


def email_with_html(*parts):
    return ParsedEmail(html_parts=list(parts))


class TestExtractFeatures:
    def test_counts_plain_links(self):
        message = email_with_html(
            '<a href="http://a.example">a</a>'
            '<a href="http://b.example">b</a>'
            '<a href="http://c.example">c</a>'
        )
        features, findings = extract_features(message)
        assert (features.visible_links, features.invisible_links, features.unmatching_urls) == (3, 0, 0)
        assert findings == []

    def test_white_on_white_link_is_invisible(self):
        message = email_with_html(
            '<body bgcolor="#fff"><a href="http://x.example" style="color:#fff">free money</a></body>'
        )
        features, findings = extract_features(message)
        assert (features.visible_links, features.invisible_links, features.unmatching_urls) == (1, 1, 0)
        assert findings[0].kind is FindingKind.INVISIBLE_LINK
        assert findings[0].affects_verdict

    def test_text_only_message_has_no_features(self):
        message = ParsedEmail(text_parts=["see http://x.example for details"])
        features, findings = extract_features(message)
        assert (features.visible_links, features.invisible_links, features.unmatching_urls) == (0, 0, 0)
        assert findings == []

    def test_features_summed_across_parts(self):
        message = email_with_html(
            '<a href="http://a.example">one</a>',
            '<a href="http://evil.example">http://bank.example</a>',
        )
        features, findings = extract_features(message)
        assert features.visible_links == 2
        assert features.unmatching_urls == 1
        assert findings[0].part_index == 1

    def test_supplementary_flags_do_not_affect_verdict(self):
        long_href = "http://x.example/" + "a" * 300
        message = email_with_html(
            '<a href="http://203.0.113.5/x">pay</a>'
            f'<a href="{long_href}">read</a>'
            '<div style="display:none"><a href="http://y.example">y</a></div>'
        )
        features, findings = extract_features(message)
        kinds = [f.kind for f in findings]
        assert FindingKind.IP_LITERAL_HOST in kinds
        assert FindingKind.LONG_HYPERLINK in kinds
        assert FindingKind.HIDDEN_BY_CSS in kinds
        assert not any(f.affects_verdict for f in findings)
        assert classify(features).label is VerdictLabel.SAFE

    def test_finding_counts_match_features(self):
        message = email_with_html(
            '<body bgcolor="white">'
            '<a href="http://evil.example" style="color:white">http://bank.example</a>'
            '<a href="http://two.example" style="color:#fefefe">x</a>'
            "</body>"
        )
        features, findings = extract_features(message)
        invisible = sum(1 for f in findings if f.kind is FindingKind.INVISIBLE_LINK)
        unmatching = sum(1 for f in findings if f.kind is FindingKind.UNMATCHING_URL)
        assert invisible == features.invisible_links == 2
        assert unmatching == features.unmatching_urls == 1

    def test_threshold_is_honored(self):
        document = '<body bgcolor="#F48080"><a href="http://x.example" style="color:#000">x</a></body>'
        lax = VisibilityPolicy(threshold=500)   # difference is exactly 500
        strict = VisibilityPolicy(threshold=501)
        _, findings_lax = extract_features(email_with_html(document), lax)
        _, findings_strict = extract_features(email_with_html(document), strict)
        assert findings_lax == []
        assert [f.kind for f in findings_strict] == [FindingKind.INVISIBLE_LINK]


class TestClassify:
    def test_safe_with_links(self):
        verdict = classify(LinkFeatures(5, 0, 0))
        assert verdict.label is VerdictLabel.SAFE
        assert verdict.advisory is Advisory.NONE

    def test_invisible_link_triggers(self):
        verdict = classify(LinkFeatures(3, 1, 0))
        assert verdict.label is VerdictLabel.PHISHING_SUSPECTED
        assert verdict.advisory is Advisory.DELETE

    def test_empty_message_is_safe(self):
        assert classify(LinkFeatures(0, 0, 0)).label is VerdictLabel.SAFE

    def test_rule_over_random_triples(self):
        rng = random.Random(42)
        for _ in range(10_000):
            visible = rng.randint(0, 40)
            invisible = rng.randint(0, visible)
            unmatching = rng.randint(0, visible)
            verdict = classify(LinkFeatures(visible, invisible, unmatching))
            expected = invisible + unmatching >= 1
            assert (verdict.label is VerdictLabel.PHISHING_SUSPECTED) == expected

    def test_visible_links_alone_never_changes_the_label(self):
        for visible in range(0, 200):
            assert classify(LinkFeatures(visible, 0, 0)).label is VerdictLabel.SAFE

    def test_feature_invariants_enforced(self):
        with pytest.raises(ValueError):
            LinkFeatures(1, 2, 0)
        with pytest.raises(ValueError):
            LinkFeatures(1, 0, 2)
        with pytest.raises(ValueError):
            LinkFeatures(-1, 0, 0)

    def test_verdict_invariant_enforced(self):
        with pytest.raises(ValueError):
            Verdict(VerdictLabel.SAFE, Advisory.DELETE)
        with pytest.raises(ValueError):
            Verdict(VerdictLabel.PHISHING_SUSPECTED, Advisory.NONE)


class TestScan:
    def test_unmatching_fixture_flagged(self):
        report = scan(RawMessage(load_fixture("phish_unmatching_host.eml"), "phish.eml"))
        assert report.verdict.label is VerdictLabel.PHISHING_SUSPECTED
        assert report.verdict.advisory is Advisory.DELETE
        unmatching = [f for f in report.findings if f.kind is FindingKind.UNMATCHING_URL]
        assert len(unmatching) == 1
        assert unmatching[0].href == "http://phish.example/login"

    def test_benign_newsletter_safe(self):
        report = scan(RawMessage(load_fixture("benign_newsletter.eml"), "news.eml"))
        assert report.verdict.label is VerdictLabel.SAFE
        assert report.features.visible_links == 3

    def test_difference_exactly_500_is_safe(self):
        report = scan(RawMessage(load_fixture("benign_difference_500.eml"), "b.eml"))
        assert report.verdict.label is VerdictLabel.SAFE

    def test_payload_in_second_part_still_caught(self):
        report = scan(RawMessage(load_fixture("phish_second_part.eml"), "p.eml"))
        assert report.verdict.label is VerdictLabel.PHISHING_SUSPECTED

    def test_base64_html_body_scanned(self):
        report = scan(RawMessage(load_fixture("phish_base64_html.eml"), "p.eml"))
        assert report.verdict.label is VerdictLabel.PHISHING_SUSPECTED
        assert report.features.unmatching_urls == 1

    def test_whole_corpus_matches_hand_labels(self):
        for path in PHISHING_FIXTURES:
            report = scan(RawMessage(path.read_bytes(), path.name))
            assert report.verdict.label is VerdictLabel.PHISHING_SUSPECTED, path.name
        for path in BENIGN_FIXTURES:
            report = scan(RawMessage(path.read_bytes(), path.name))
            assert report.verdict.label is VerdictLabel.SAFE, path.name

    def test_deterministic_apart_from_timestamp(self):
        data = load_fixture("phish_ip_literal.eml")
        first = scan(RawMessage(data, "x.eml")).to_dict()
        second = scan(RawMessage(data, "x.eml")).to_dict()
        first.pop("scanned_at")
        second.pop("scanned_at")
        assert json.dumps(first) == json.dumps(second)

    def test_ipv6_href_recorded_as_parse_warning(self):
        body = (
            "Content-Type: text/html\r\n\r\n"
            '<a href="http://[2001:db8::1]/x">internal tool</a>'
        )
        report = scan(RawMessage(body.encode(), "v6.eml"))
        assert report.features.visible_links == 1
        assert report.verdict.label is VerdictLabel.SAFE
        assert any("IPv6" in w for w in report.warnings)

    def test_report_label_comes_from_source_name(self):
        report = scan(RawMessage(load_fixture("benign_click_here.eml"), "inbox/42.eml"))
        assert report.message_label == "inbox/42.eml"

    def test_scanned_at_is_utc_rfc3339(self):
        report = scan(RawMessage(load_fixture("benign_click_here.eml"), "x"))
        assert report.to_dict()["scanned_at"].endswith("Z")


class TestReportSerialization:
    def test_json_round_trip(self):
        report = scan(RawMessage(load_fixture("phish_ip_literal.eml"), "x.eml"))
        loaded = ScanReport.from_dict(json.loads(report.to_json()))
        assert loaded == report

    def test_schema_field_names(self):
        report = scan(RawMessage(load_fixture("phish_white_on_white.eml"), "x.eml"))
        data = report.to_dict()
        assert set(data) == {
            "message_label", "verdict", "advisory", "features",
            "findings", "warnings", "engine_version", "scanned_at",
        }
        assert set(data["features"]) == {"visible_links", "invisible_links", "unmatching_urls"}
        assert data["verdict"] in ("phishing_suspected", "safe")
        assert data["advisory"] in ("delete", "none")
        for finding in data["findings"]:
            assert {"kind", "href", "anchor_text", "detail", "node_path",
                    "part_index", "affects_verdict"} == set(finding)

    def test_report_invariants_enforced(self):
        report = scan(RawMessage(load_fixture("phish_white_on_white.eml"), "x.eml"))
        with pytest.raises(ValueError):
            ScanReport(
                message_label="x",
                features=LinkFeatures(1, 1, 0),
                verdict=Verdict(VerdictLabel.SAFE, Advisory.NONE),
                findings=report.findings,
                warnings=(),
                engine_version="0",
                scanned_at=report.scanned_at,
            )

    def test_monotonicity_adding_a_verdict_finding_never_yields_safe(self):
        # any safe message, plus one more invisible link, must flip
        message = ParsedEmail(html_parts=['<a href="http://a.example">plain</a>'])
        features, _ = extract_features(message)
        assert classify(features).label is VerdictLabel.SAFE
        bumped = LinkFeatures(
            features.visible_links + 1,
            features.invisible_links + 1,
            features.unmatching_urls,
        )
        assert classify(bumped).label is VerdictLabel.PHISHING_SUSPECTED

    def test_self_consistency_under_structured_fuzz(self):
        rng = random.Random(99)
        snippets = [
            '<a href="http://a.example">ok</a>',
            '<a href="http://evil.example">http://bank.example</a>',
            '<a href="http://x.example" style="color:#fff">x</a>',
            "<p>no links here</p>",
            '<body bgcolor="#fff">',
            '<a href="http://203.0.113.5/p">ip</a>',
            "</body>",
            "<div style='display:none'>",
        ]
        for _ in range(150):
            html = "".join(rng.choice(snippets) for _ in range(rng.randint(0, 8)))
            body = f"Content-Type: text/html\r\n\r\n{html}"
            report = scan(RawMessage(body.encode() or b" ", "fuzz"))
            invisible = sum(1 for f in report.findings if f.kind is FindingKind.INVISIBLE_LINK)
            unmatching = sum(1 for f in report.findings if f.kind is FindingKind.UNMATCHING_URL)
            assert invisible == report.features.invisible_links
            assert unmatching == report.features.unmatching_urls
            suspicious = invisible + unmatching > 0
            assert (report.verdict.label is VerdictLabel.PHISHING_SUSPECTED) == suspicious
