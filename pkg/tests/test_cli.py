"""CLI behavior: build reports, exit codes, and byte-parity with the HTTP API."""

import json
import signal
import socket
import subprocess
import sys
import time
import urllib.request
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from newsgraph.cli import main
from newsgraph.service import create_app
from _synth import corpus_lines, random_corpus

FIXTURE_SNAP = Path(__file__).parent / "fixtures" / "store_200.snap"
FIXTURE_CORPUS = Path(__file__).parent / "fixtures" / "corpus_200.jsonl"


def run_cli(*args):
    return CliRunner().invoke(main, list(args))


# -- build --------------------------------------------------------------------


def test_build_report_counts(tmp_path):
    records = random_corpus(seed=31, n_docs=40)
    records[3]["char_count"] = 10  # too short
    records[7]["char_count"] = 30000  # too long
    corpus = tmp_path / "c.jsonl"
    corpus.write_text(corpus_lines(records) + "{bad json\n")
    out = tmp_path / "s.snap"
    result = run_cli("build", str(corpus), str(out))
    assert result.exit_code == 0, result.output
    report = json.loads(result.stdout)
    assert report["documents_read"] == 41
    assert report["documents_admitted"] == 38
    rejected = report["documents_rejected"]
    assert rejected["too_short"] == 1
    assert rejected["too_long"] == 1
    assert rejected["parse_error"] == 1
    assert report["aggregated_edge_cells"] > 0
    assert out.exists()


def test_build_duplicate_ids_counted(tmp_path):
    records = random_corpus(seed=32, n_docs=5)
    records.append(dict(records[0]))
    corpus = tmp_path / "c.jsonl"
    corpus.write_text(corpus_lines(records))
    out = tmp_path / "s.snap"
    result = run_cli("build", str(corpus), str(out))
    report = json.loads(result.stdout)
    assert report["documents_rejected"]["duplicate_id"] == 1
    assert report["documents_admitted"] == 5


def test_build_custom_limits_admit_everything(tmp_path):
    records = random_corpus(seed=33, n_docs=10)
    records[0]["char_count"] = 1
    corpus = tmp_path / "c.jsonl"
    corpus.write_text(corpus_lines(records))
    out = tmp_path / "s.snap"
    result = run_cli("build", str(corpus), str(out), "--min-chars", "0")
    report = json.loads(result.stdout)
    assert report["documents_admitted"] == 10


def test_build_report_matches_fixture_recount(tmp_path):
    out = tmp_path / "s.snap"
    result = run_cli("build", str(FIXTURE_CORPUS), str(out))
    report = json.loads(result.stdout)
    assert report["documents_read"] == 200
    assert report["documents_admitted"] == 200
    assert out.read_bytes() == FIXTURE_SNAP.read_bytes()


def test_build_empty_corpus(tmp_path):
    corpus = tmp_path / "empty.jsonl"
    corpus.write_text("")
    out = tmp_path / "s.snap"
    result = run_cli("build", str(corpus), str(out))
    assert result.exit_code == 0
    report = json.loads(result.stdout)
    assert report["documents_read"] == 0
    assert report["documents_admitted"] == 0


def test_build_missing_corpus_is_usage_error(tmp_path):
    result = run_cli("build", str(tmp_path / "nope.jsonl"), str(tmp_path / "s.snap"))
    assert result.exit_code == 2


def test_build_warns_on_parse_errors(tmp_path):
    corpus = tmp_path / "c.jsonl"
    lines = [json.dumps(r) for r in random_corpus(seed=34, n_docs=2)]
    lines += ["{bad%d" % i for i in range(9)]
    corpus.write_text("\n".join(lines) + "\n")
    out = tmp_path / "s.snap"
    result = run_cli("build", str(corpus), str(out))
    assert result.exit_code == 0
    warnings = [l for l in result.stderr.splitlines() if "line" in l]
    assert 0 < len(warnings) <= 5  # capped
    report = json.loads(result.stdout)
    assert report["documents_rejected"]["parse_error"] == 9


# -- query exits ----------------------------------------------------------------


def test_query_unknown_entity_exit_3():
    result = run_cli(
        "query", str(FIXTURE_SNAP), "adjacent",
        "--entity", "E9999", "--from", "2021-03-03", "--to", "2021-03-24",
    )
    assert result.exit_code == 3
    err = json.loads(result.stderr.splitlines()[-1])
    assert err["error"]["field"] == "entity"


def test_query_same_pair_exit_2():
    result = run_cli(
        "query", str(FIXTURE_SNAP), "terms",
        "--entity-a", "E001", "--entity-b", "E001",
        "--from", "2021-03-03", "--to", "2021-03-24",
    )
    assert result.exit_code == 2


def test_query_inverted_range_exit_2():
    result = run_cli(
        "query", str(FIXTURE_SNAP), "global",
        "--from", "2021-03-24", "--to", "2021-03-03",
    )
    assert result.exit_code == 2


def test_query_bad_store_exit_1(tmp_path):
    bad = tmp_path / "bad.snap"
    bad.write_text("not a snapshot\n")
    result = run_cli("query", str(bad), "global", "--from", "2021-03-03", "--to", "2021-03-24")
    assert result.exit_code == 1


def test_query_unknown_subcommand_exit_2():
    result = run_cli("query", str(FIXTURE_SNAP), "frobnicate")
    assert result.exit_code == 2


def test_recommend_malformed_node_exit_2():
    result = run_cli(
        "query", str(FIXTURE_SNAP), "recommend",
        "--node", "no-colon-here", "--node", "entity:E001",
        "--from", "2021-03-03", "--to", "2021-03-24",
    )
    assert result.exit_code == 2


def test_recommend_bad_kind_exit_2():
    result = run_cli(
        "query", str(FIXTURE_SNAP), "recommend",
        "--node", "planet:E001", "--node", "entity:E002",
        "--from", "2021-03-03", "--to", "2021-03-24",
    )
    assert result.exit_code == 2


def test_pretty_flag_changes_format_not_content():
    args = ["query", str(FIXTURE_SNAP), "global", "--from", "2021-03-03", "--to", "2021-03-24"]
    compact = run_cli(*args)
    pretty = run_cli("query", "--pretty", str(FIXTURE_SNAP), "global",
                     "--from", "2021-03-03", "--to", "2021-03-24")
    assert compact.exit_code == pretty.exit_code == 0
    assert json.loads(compact.stdout) == json.loads(pretty.stdout)
    assert "\n" in pretty.stdout.strip()
    assert "\n" not in compact.stdout.strip()


# -- CLI/HTTP parity -------------------------------------------------------------


@pytest.fixture(scope="module")
def http_client(index_200):
    return TestClient(create_app(index_200))


def http_bytes(client, path, body) -> str:
    resp = client.post(path, json=body)
    assert resp.status_code == 200, resp.content
    return resp.content.decode()


def test_cli_matches_http_across_randomized_queries(http_client, index_200):
    rng = np.random.default_rng(77)
    lo, hi = index_200.corpus_span()
    entity_ids = sorted(node.id for _, node, _ in index_200.entities())
    outlets = index_200.outlets
    checked = 0
    for _ in range(50):
        a = int(rng.integers(0, 25))
        b = int(rng.integers(0, 30 - a))
        start = lo.fromordinal(lo.toordinal() + a)
        end = start.fromordinal(start.toordinal() + b)
        picked = None
        if rng.random() < 0.4:
            picked = sorted(
                str(o) for o in rng.choice(outlets, size=int(rng.integers(1, 3)), replace=False)
            )
        k = int(rng.integers(1, 12))
        m = int(rng.integers(0, 8))
        base_args = ["--from", start.isoformat(), "--to", end.isoformat(),
                     "-k", str(k), "-m", str(m)]
        for outlet in picked or []:
            base_args += ["--outlet", outlet]
        body = {
            "range": {"start": start.isoformat(), "end": end.isoformat()},
            "outlets": picked,
            "num_edges": k,
            "num_terms": m,
        }

        kind = ["global", "targeted", "terms", "adjacent", "recommend"][checked % 5]
        if kind == "global":
            result = run_cli("query", str(FIXTURE_SNAP), "global", *base_args)
            want = http_bytes(http_client, "/api/topics/global", body)
        else:
            seed_resp = http_client.post("/api/topics/global", json=body).json()
            edges = [e for t in seed_resp["topics"] for e in t["edges"]]
            if not edges:
                checked += 1
                continue
            ea = edges[0]["source"]["id"]
            eb = edges[0]["target"]["id"]
            if kind == "targeted":
                result = run_cli("query", str(FIXTURE_SNAP), "targeted",
                                 "--entity-a", ea, "--entity-b", eb, *base_args)
                want = http_bytes(http_client, "/api/topics/targeted",
                                  {**body, "entity_a": ea, "entity_b": eb})
            elif kind == "terms":
                result = run_cli("query", str(FIXTURE_SNAP), "terms",
                                 "--entity-a", ea, "--entity-b", eb, *base_args)
                want = http_bytes(http_client, "/api/expand/terms",
                                  {**body, "entity_a": ea, "entity_b": eb})
            elif kind == "adjacent":
                result = run_cli("query", str(FIXTURE_SNAP), "adjacent",
                                 "--entity", ea, *base_args)
                want = http_bytes(http_client, "/api/expand/adjacent",
                                  {**body, "entity": ea})
            else:
                n = int(rng.integers(1, 8))
                result = run_cli(
                    "query", str(FIXTURE_SNAP), "recommend",
                    "--node", f"entity:{ea}", "--node", f"entity:{eb}",
                    "-n", str(n), *base_args,
                )
                want = http_bytes(
                    http_client, "/api/recommend",
                    {**body,
                     "nodes": [{"kind": "entity", "id": ea}, {"kind": "entity", "id": eb}],
                     "num_articles": n},
                )
        assert result.exit_code == 0, result.stderr
        assert result.stdout.strip() == want
        checked += 1
    assert checked >= 45


# -- serve ----------------------------------------------------------------------


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def test_serve_round_trip():
    port = free_port()
    proc = subprocess.Popen(
        [sys.executable, "-m", "newsgraph.cli", "serve", str(FIXTURE_SNAP),
         "--port", str(port), "--query-limit", "4"],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
    )
    try:
        deadline = time.monotonic() + 15
        health = None
        while time.monotonic() < deadline:
            try:
                with urllib.request.urlopen(f"http://127.0.0.1:{port}/api/health") as resp:
                    health = json.loads(resp.read())
                break
            except OSError:
                time.sleep(0.15)
        assert health is not None, proc.stderr.read().decode() if proc.poll() else "no response"
        assert health["status"] == "ok"
        body = json.dumps(
            {"range": {"start": "2021-03-03", "end": "2021-03-24"}, "outlets": None}
        ).encode()
        req = urllib.request.Request(
            f"http://127.0.0.1:{port}/api/topics/global",
            data=body,
            headers={"Content-Type": "application/json", "X-Client-Fp": "cli-test"},
        )
        with urllib.request.urlopen(req) as resp:
            payload = json.loads(resp.read())
        assert payload["mode"] == "global"
    finally:
        proc.send_signal(signal.SIGINT)
        try:
            proc.wait(timeout=10)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.wait(timeout=10)
