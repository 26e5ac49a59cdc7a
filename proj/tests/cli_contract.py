"""Runs every optiq subcommand and checks outputs against docs/schemas."""

import argparse
import json
import os
import pathlib
import subprocess
import sys
import tempfile
import xml.etree.ElementTree as ET

import jsonschema
from referencing import Registry, Resource

FAILURES = []


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        FAILURES.append(what)


def load_registry(schema_dir):
    resources = []
    schemas = {}
    for path in sorted(schema_dir.glob("*.schema.json")):
        doc = json.loads(path.read_text())
        schemas[path.name.split(".")[0]] = doc
        resources.append((doc["$id"], Resource.from_contents(doc)))
    return schemas, Registry().with_resources(resources)


def validate(doc, name, schemas, registry):
    validator = jsonschema.Draft202012Validator(schemas[name], registry=registry)
    errors = sorted(validator.iter_errors(doc), key=str)
    for e in errors[:3]:
        print("     ", e.message)
    return not errors


def run(cli, args, outdir):
    env = dict(os.environ, OPTIQ_OUTPUT_DIR=str(outdir))
    return subprocess.run([cli, *args], capture_output=True, text=True, env=env, cwd=outdir)


RUNS = {
    "photon": ["photon", "--n", "12", "--steps", "4", "--field", "F"],
    "scalar": ["scalar", "--wave", "stationary", "--mass", "1", "--n", "17", "--write-series", "snap"],
    "rays": ["rays", "--medium", '{"kind":"linear","a":"1/2"}', "--launch", "plane", "--x0", "0", "0", "0",
             "--dir", "1", "0", "1", "--tau0", "0", "--tau1", "2"],
    "huygens": ["huygens", "--n", "16", "--count", "2"],
    "modes": ["modes", "--count", "4", "--h", "1/40"],
    "chladni": ["chladni", "--h", "1/48", "--sines", "2:1:1", "1:2:1"],
    "ck": ["ck", "--n", "17", "--csv", "ck.csv"],
    "knots": ["knots", "--slope", "3/2", "--tubes", "2/5", "1/5", "--n", "71", "--csv", "knots.csv"],
    "tise": ["tise", "--h", "1/64", "--psi", "psi"],
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--schemas", required=True, type=pathlib.Path)
    opts = ap.parse_args()
    opts.cli = os.path.abspath(opts.cli)
    schemas, registry = load_registry(opts.schemas)

    with tempfile.TemporaryDirectory() as tmp:
        out = pathlib.Path(tmp)
        for name, args in RUNS.items():
            r = run(opts.cli, [*args, "--out", f"{name}.json"], out)
            check(r.returncode == 0, f"{name} exits 0 ({r.stderr.strip()[:200]})")
            if r.returncode == 0:
                doc = json.loads((out / f"{name}.json").read_text())
                check(validate(doc, name, schemas, registry), f"{name} output matches its schema")

        for header in ["F.json", "snap.0.V.json", "psi.json"]:
            doc = json.loads((out / header).read_text())
            check(validate(doc, "field", schemas, registry), f"{header} matches the field schema")

        knots = json.loads((out / "knots.json").read_text())
        check(knots["closed"] is True and knots["p"] == 2 and knots["q"] == 3, "knots slope 3/2 closes as (2,3)")
        check(len(knots["links"]) == 1, "two closed knots give one linking pair")
        check((out / "knots.csv").read_text().startswith("curve,closed,x,y,z\n"), "knots CSV header")

        r = run(opts.cli, ["modes", "--domain", "dodecahedron"], out)
        check(r.returncode == 2, "unknown domain exits 2")
        r = run(opts.cli, ["modes", "--h", "one/128"], out)
        check(r.returncode == 2, "malformed fraction exits 2")
        r = run(opts.cli, ["frobnicate"], out)
        check(r.returncode == 2, "unknown subcommand exits 2")

        r = run(opts.cli, ["modes", "--h", "1/16", "--out", "coarse.json"], out)
        check(r.returncode == 1, "too coarse membrane exits 1")
        err = json.loads(r.stderr.strip().splitlines()[-1]) if r.stderr.strip() else {}
        check(validate(err, "error", schemas, registry) and err.get("error") == "contract", "error report schema")

        r = run(opts.cli, ["tise", "--h", "1/64", "--max-iterations", "1", "--out", "cap.json"], out)
        err = json.loads(r.stderr.strip().splitlines()[-1]) if r.stderr.strip() else {}
        check(r.returncode == 1 and err.get("error") == "convergence" and err.get("residual", 0) > 0,
              "iteration cap exits 1 with the residual")

        (out / "cfg.json").write_text(json.dumps({"slope": "3/2", "n": 71, "out": "from_config.json"}))
        r = run(opts.cli, ["knots", "--config", "cfg.json"], out)
        doc = json.loads((out / "from_config.json").read_text()) if r.returncode == 0 else {}
        check(doc.get("p") == 2 and doc.get("q") == 3, "config file supplies options")
        r = run(opts.cli, ["knots", "--config", "cfg.json", "--slope", "1", "--out", "override.json"], out)
        doc = json.loads((out / "override.json").read_text()) if r.returncode == 0 else {}
        check(doc.get("slope") == "1" and doc.get("p") == 1 and doc.get("q") == 1, "command line beats config")
        (out / "bad.json").write_text(json.dumps({"slope": "3/2", "colour": "red"}))
        r = run(opts.cli, ["knots", "--config", "bad.json"], out)
        check(r.returncode == 2 and "colour" in r.stderr, "unknown config key exits 2")
        r = run(opts.cli, ["tise", "--potential", '{"kind":"box","depth":3}'], out)
        check(r.returncode == 2, "unknown potential key exits 2")

        r = run(opts.cli, ["chladni", "--h", "1/48", "--mode", "0", "--svg", "empty.svg", "--out", "e.json"], out)
        root = ET.parse(out / "empty.svg").getroot()
        ns = "{http://www.w3.org/2000/svg}"
        check(root.tag == ns + "svg" and root.get("version") == "1.1", "SVG 1.1 root")
        check(len(root.findall(f".//{ns}path")) == 0 and len(root.findall(f".//{ns}rect")) == 1,
              "ground mode draws the outline only")
        r = run(opts.cli, ["chladni", "--h", "1/48", "--sines", "2:1:1", "--svg", "v.svg", "--out", "v.json"], out)
        root = ET.parse(out / "v.svg").getroot()
        paths = root.findall(f".//{ns}path")
        check(len(paths) == 1, "mode (2,1) draws one path")
        xs = {float(tok.split()[0][1:]) if tok[0] in "ML" else float(tok.split()[0])
              for tok in paths[0].get("d").replace("L", "|L").replace("M", "|M").split("|") if tok.strip()}
        check(all(abs(x - 0.5) < 1e-3 for x in xs), "mode (2,1) path is the line x = 1/2")
        first = (out / "v.svg").read_bytes()
        run(opts.cli, ["chladni", "--h", "1/48", "--sines", "2:1:1", "--svg", "v.svg", "--out", "v.json"], out)
        check((out / "v.svg").read_bytes() == first, "SVG bytes repeat")

    print(f"{len(FAILURES)} failure(s)")
    return 1 if FAILURES else 0


if __name__ == "__main__":
    sys.exit(main())
