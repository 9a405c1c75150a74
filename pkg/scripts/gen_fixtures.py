#!/usr/bin/env python3
"""Regenerate committed test fixtures.

Writes the 200-document corpus, its snapshot, the stemmer vocabulary
pair, and recorded API exchanges. Everything is seeded, so reruns are
byte-identical; the script asserts that when a fixture already exists.

Run from the repository root:

    python3 scripts/gen_fixtures.py
"""

from __future__ import annotations

import json
import string
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

import numpy as np
from fastapi.testclient import TestClient

from newsgraph.payloads import canonical_dumps
from newsgraph.service import create_app
from newsgraph.stemming import stem as product_stem
from _synth import WORD_POOL, build_store, corpus_lines, random_corpus
from porter_reference import stem as reference_stem

FIXTURES = ROOT / "tests" / "fixtures"

TRICKY = [
    "caresses", "ponies", "ties", "caress", "cats", "feed", "agreed",
    "plastered", "bled", "motoring", "sing", "conflated", "troubled",
    "sized", "hopping", "tanned", "falling", "hissing", "fizzed",
    "failing", "filing", "happy", "sky", "relational", "conditional",
    "rational", "valenci", "hesitanci", "digitizer", "conformabli",
    "radicalli", "differentli", "vileli", "analogousli", "vietnamization",
    "predication", "operator", "feudalism", "decisiveness", "hopefulness",
    "callousness", "formaliti", "sensitiviti", "sensibiliti", "triplicate",
    "formative", "formalize", "electriciti", "electrical", "hopeful",
    "goodness", "revival", "allowance", "inference", "airliner",
    "gyroscopic", "adjustable", "defensible", "irritant", "replacement",
    "adjustment", "dependent", "adoption", "homologou", "communism",
    "activate", "angulariti", "homologous", "effective", "bowdlerize",
    "probate", "rate", "cease", "controll", "roll", "archaeology",
    "crumbli", "cylindrical", "agreement", "abeyance", "knightly",
    "generalization", "oscillation", "oscillator", "sky", "skies",
    "bias", "news", "proceed", "exceed", "succeed", "canvass",
]

BASES = [
    "connect", "adjust", "form", "relate", "operate", "depend", "act",
    "protect", "predict", "create", "measure", "general", "special",
    "nation", "ration", "digit", "final", "critic", "electric", "motor",
    "sense", "decide", "conform", "triplicate", "valid", "hope", "use",
    "state", "note", "marginal", "region", "capital", "moral", "vital",
]
SUFFIXES = [
    "", "s", "es", "ies", "ed", "ing", "ings", "er", "ers", "ation",
    "ational", "tional", "ate", "izer", "ization", "iveness", "fulness",
    "ousness", "aliti", "iviti", "biliti", "alism", "ical", "icate",
    "ative", "alize", "iciti", "ful", "ness", "ance", "ence", "ant",
    "ent", "ement", "ment", "ion", "ou", "ism", "iti", "ous", "ive",
    "ize", "al", "ic", "able", "ible", "eed", "e", "ll", "y", "ly",
    "eli", "ousli", "entli", "alli", "bli", "enci", "anci", "logi",
    "icity", "ality", "ivity", "ability",
]


def porter_vocabulary() -> list[str]:
    rng = np.random.default_rng(20170101)
    words = list(dict.fromkeys(TRICKY))
    for base in BASES:
        for suf in SUFFIXES:
            words.append(base + suf)
    for pool_word in WORD_POOL:
        if pool_word.isascii():
            words.append(pool_word)
    letters = string.ascii_lowercase + "yy"
    for _ in range(1200):
        n = int(rng.integers(1, 13))
        word = "".join(letters[int(rng.integers(0, len(letters)))] for _ in range(n))
        words.append(word)
    return list(dict.fromkeys(words))


def write_or_check(path: Path, data: bytes, regen: bool):
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.exists() and not regen:
        existing = path.read_bytes()
        assert existing == data, f"{path} is not reproducible"
        print(f"verified {path.relative_to(ROOT)}")
    else:
        path.write_bytes(data)
        print(f"wrote {path.relative_to(ROOT)}")


def gen_porter(regen: bool):
    voc = porter_vocabulary()
    out = []
    for word in voc:
        stemmed = reference_stem(word)
        assert stemmed == product_stem(word), (word, stemmed, product_stem(word))
        out.append(stemmed)
    write_or_check(FIXTURES / "porter" / "voc.txt", ("\n".join(voc) + "\n").encode(), regen)
    write_or_check(FIXTURES / "porter" / "output.txt", ("\n".join(out) + "\n").encode(), regen)


def gen_corpus(regen: bool) -> list[dict]:
    records = random_corpus(seed=1234, n_docs=200, n_entities=25)
    write_or_check(FIXTURES / "corpus_200.jsonl", corpus_lines(records).encode(), regen)
    store = build_store(records)
    import tempfile

    with tempfile.NamedTemporaryFile(suffix=".snap") as tmp:
        store.save(tmp.name)
        data = Path(tmp.name).read_bytes()
    write_or_check(FIXTURES / "store_200.snap", data, regen)
    return records


def gen_api(records: list[dict], regen: bool):
    store = build_store(records)
    index = store.index()
    app = create_app(index)
    client = TestClient(app)

    base_range = {"start": "2021-03-03", "end": "2021-03-24"}
    body_global = {"range": base_range, "outlets": None, "num_edges": 8, "num_terms": 5}
    exchanges = {}

    def record(name: str, method: str, path: str, body=None, params=None):
        if method == "GET":
            resp = client.get(path, params=params)
        else:
            resp = client.post(path, json=body)
        entry = {
            "request": {"method": method, "path": path},
            "response": {"status": resp.status_code, "body": resp.json()},
        }
        if body is not None:
            entry["request"]["body"] = body
        if params is not None:
            entry["request"]["params"] = params
        exchanges[name] = entry

    record("meta", "GET", "/api/meta")
    record("suggest", "GET", "/api/suggest", params={"q": "meridian", "limit": 5})
    record("global", "POST", "/api/topics/global", body=body_global)

    top = client.post("/api/topics/global", json=body_global).json()
    first_edge = top["topics"][0]["edges"][0]
    ent_a = first_edge["source"]["id"]
    ent_b = first_edge["target"]["id"]

    record(
        "targeted",
        "POST",
        "/api/topics/targeted",
        body={**body_global, "entity_a": ent_a, "entity_b": ent_b},
    )
    record(
        "terms",
        "POST",
        "/api/expand/terms",
        body={**body_global, "entity_a": ent_a, "entity_b": ent_b},
    )
    record("adjacent", "POST", "/api/expand/adjacent", body={**body_global, "entity": ent_a})
    record(
        "recommend",
        "POST",
        "/api/recommend",
        body={
            "range": base_range,
            "outlets": None,
            "nodes": [
                {"kind": "entity", "id": ent_a},
                {"kind": "entity", "id": ent_b},
            ],
            "num_articles": 6,
        },
    )
    record(
        "error_unknown_entity",
        "POST",
        "/api/expand/adjacent",
        body={**body_global, "entity": "E999"},
    )
    record(
        "error_bad_range",
        "POST",
        "/api/topics/global",
        body={**body_global, "range": {"start": "2021-04-30", "end": "2021-04-01"}},
    )

    for name, entry in exchanges.items():
        data = (json.dumps(entry, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode()
        write_or_check(FIXTURES / "api" / f"{name}.json", data, regen)

    # sanity: recorded bodies round-trip through the canonical serializer
    for name, entry in exchanges.items():
        body = entry["response"]["body"]
        assert canonical_dumps(body) == canonical_dumps(json.loads(canonical_dumps(body)))


def main():
    regen = "--regen" in sys.argv
    gen_porter(regen)
    records = gen_corpus(regen)
    gen_api(records, regen)
    print("all fixtures ok")


if __name__ == "__main__":
    main()
