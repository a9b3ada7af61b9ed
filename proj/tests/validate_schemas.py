"""Validates CLI and HTTP API output against the shipped JSON schemas."""

import argparse
import json
import pathlib
import socket
import subprocess
import sys
import tempfile
import time
import urllib.error
import urllib.parse
import urllib.request

import jsonschema
from referencing import Registry, Resource

CRIMEA = "https://en.wikipedia.org/wiki/2014_Crimean_crisis"


def load_registry(schema_dir):
    schemas = {}
    for path in sorted(pathlib.Path(schema_dir).glob("*.schema.json")):
        schemas[path.name] = json.loads(path.read_text())
    registry = Registry().with_resources(
        (name, Resource.from_contents(doc)) for name, doc in schemas.items()
    )
    return schemas, registry


def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def http_get(port, path):
    try:
        with urllib.request.urlopen(f"http://127.0.0.1:{port}{path}", timeout=10) as r:
            return r.status, json.loads(r.read())
    except urllib.error.HTTPError as e:
        return e.code, json.loads(e.read())


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--geoprov", required=True)
    ap.add_argument("--fixtures", required=True)
    ap.add_argument("--schemas", required=True)
    ap.add_argument("--golden", required=True)
    ap.add_argument("--models", required=True)
    args = ap.parse_args()

    schemas, registry = load_registry(args.schemas)
    checked = []

    def check(name, doc, label):
        jsonschema.Draft202012Validator(schemas[name], registry=registry).validate(doc)
        checked.append(label)

    check("analysis.schema.json", json.loads(pathlib.Path(args.golden).read_text()), "golden analysis")
    for model in sorted(pathlib.Path(args.models).glob("*.json")):
        check("model.schema.json", json.loads(model.read_text()), f"model {model.name}")

    with tempfile.TemporaryDirectory() as tmp:
        base = [args.geoprov, "--fixtures", args.fixtures]
        out = subprocess.run(
            base + ["compare", CRIMEA, "--editions", "de,fr,pl", "--json", "--data-dir", tmp],
            check=True, capture_output=True, text=True).stdout
        check("comparison.schema.json", json.loads(out), "cli compare")

        synth = pathlib.Path(tmp) / "synth.csv"
        subprocess.run([args.geoprov, "synth", "--out", str(synth), "--n", "200"], check=True, capture_output=True)
        out = subprocess.run(
            [args.geoprov, "evaluate", "--data", str(synth), "--folds", "4", "--epochs", "10", "--json"],
            check=True, capture_output=True, text=True).stdout
        check("eval_report.schema.json", json.loads(out), "cli evaluate")

        port = free_port()
        server = subprocess.Popen(
            base + ["serve", "--host", "127.0.0.1", "--port", str(port), "--data-dir", tmp + "/api"],
            stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
        try:
            for _ in range(100):
                try:
                    status, health = http_get(port, "/api/health")
                    break
                except (urllib.error.URLError, ConnectionError):
                    time.sleep(0.1)
            else:
                raise RuntimeError("server did not come up")
            assert status == 200
            check("health.schema.json", health, "api health")

            q = urllib.parse.quote(CRIMEA, safe="")
            status, analysis = http_get(port, f"/api/analysis?url={q}")
            assert status == 200, status
            check("analysis.schema.json", analysis, "api analysis")

            status, cmp = http_get(port, f"/api/compare?url={q}&editions=de,pl")
            assert status == 200, status
            check("comparison.schema.json", cmp, "api compare")

            status, articles = http_get(port, "/api/articles")
            assert status == 200 and len(articles) == 2, articles
            check("articles.schema.json", articles, "api articles")

            for path, want in [("/api/analysis", 400),
                               ("/api/analysis?url=" + urllib.parse.quote(
                                   "https://en.wikipedia.org/wiki/No_such_article", safe=""), 404),
                               ("/api/analysis?url=" + urllib.parse.quote(
                                   "https://en.wikipedia.org/wiki/Never_recorded", safe=""), 502)]:
                status, err = http_get(port, path)
                assert status == want, (path, status)
                check("error.schema.json", err, f"api error {want}")
        finally:
            server.terminate()
            server.wait(timeout=10)

    for label in checked:
        print("valid:", label)
    return 0


if __name__ == "__main__":
    sys.exit(main())
