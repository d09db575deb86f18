#!/usr/bin/env python3
"""End-to-end checks of the pleat executable: goldens, schema, exit codes, SVG."""

import json
import math
import os
import subprocess
import sys
import tempfile

import jsonschema

EXE, ROOT = sys.argv[1], sys.argv[2]
GOLDEN = os.path.join(ROOT, "tests", "golden")
with open(os.path.join(ROOT, "docs", "report.schema.json")) as f:
    SCHEMA = json.load(f)

failures = []


def check(ok, what):
    print(("ok    " if ok else "FAIL  ") + what)
    if not ok:
        failures.append(what)


def reject_constant(name):
    raise ValueError("non-finite number " + name)


def load(text):
    return json.loads(text, parse_constant=reject_constant)


def run(*args):
    return subprocess.run([EXE, *args], capture_output=True, text=True)


def close(a, b, path=""):
    """Structural equality with a tolerance on floats."""
    if isinstance(a, dict):
        if not isinstance(b, dict) or a.keys() != b.keys():
            return path or "/"
        for k in a:
            bad = close(a[k], b[k], path + "/" + k)
            if bad:
                return bad
        return None
    if isinstance(a, list):
        if not isinstance(b, list) or len(a) != len(b):
            return path
        for i, (x, y) in enumerate(zip(a, b)):
            bad = close(x, y, f"{path}[{i}]")
            if bad:
                return bad
        return None
    if isinstance(a, float) or isinstance(b, float):
        if not math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-9):
            return path
        return None
    return None if a == b else path


GOLDENS = [
    ("bundle_RL.json", ["bundle", "--word", "RL"]),
    ("bundle_RRLL.json", ["bundle", "--word", "RRLL"]),
    ("bridge_RL.json", ["bridge", "--word", "RL"]),
]

for name, args in GOLDENS:
    r = run(*args)
    check(r.returncode == 0, f"{name}: exit 0")
    report = load(r.stdout)
    jsonschema.validate(report, SCHEMA)
    with open(os.path.join(GOLDEN, name)) as f:
        golden = load(f.read())
    bad = close(golden, report)
    check(bad is None, f"{name}: matches golden" + ("" if bad is None else f" (differs at {bad})"))
    check(run(*args).stdout == r.stdout, f"{name}: byte-identical rerun")

rl = load(run("bundle", "--word", "RL").stdout)
check(abs(rl["volume"] - 2.029883212819307) < 1e-9 and rl["converged"], "RL volume and convergence")

with tempfile.TemporaryDirectory() as tmp:
    out = os.path.join(tmp, "out.json")
    r = run("sphere", "--matrix", "2,1,1,1", "--json", out)
    check(r.returncode == 0 and r.stdout == "", "--json writes to the file only")
    with open(out) as f:
        sphere = load(f.read())
    jsonschema.validate(sphere, SCHEMA)
    check(abs(sphere["volume"] - 2 * rl["volume"]) < 1e-9, "sphere bundle doubles the torus bundle")

    r = run("bundle", "--word", "R20L20", "--rnlm", "20,20", "--json", out)
    with open(out) as f:
        rep = load(f.read())
    jsonschema.validate(rep, SCHEMA)
    check(r.returncode == 0 and "rnlm" in rep and rep["rnlm"]["residual"] < 1e-13, "--rnlm cross-check")

    cases = [
        (["bundle", "--matrix", "1,1,0,1"], 3, "ENotAnosov"),
        (["bundle", "--word", "RXL"], 2, "EParse"),
        (["bundle", "--word", "RRR"], 3, "EWordNotMixed"),
        (["bridge", "--word", "RRR"], 3, "ETooFewSyllables"),
        (["bundle", "--word", "RL", "--rnlm", "5"], 2, None),
        (["bundle", "--word", "R3L2", "--max-iter", "1"], 4, None),
    ]
    for args, code, name in cases:
        if os.path.exists(out):
            os.remove(out)
        r = run(*args, "--json", out)
        check(r.returncode == code, f"{' '.join(args)}: exit {code} (got {r.returncode})")
        if name:
            with open(out) as f:
                err = load(f.read())
            jsonschema.validate(err, SCHEMA)
            check(err["error"]["code"] == name, f"{' '.join(args)}: error code {name}")
    r = run("frobnicate")
    check(r.returncode == 2, "unknown subcommand: exit 2")

    def svg(*args):
        path = os.path.join(tmp, "cusp.svg")
        r = run(*args, "--svg", path, "--svg-periods", "1")
        with open(path) as f:
            return r.returncode, f.read()

    for args, tiles, comps in [
        (["bundle", "--word", "RL"], 4, 1),
        (["bundle", "--word", "R4L4"], 16, 1),
        (["bridge", "--word", "R3L2R"], 40, 2),
    ]:
        rc, text = svg(*args)
        n = text.count("<polygon points=")
        check(rc == 0 and n == tiles and text.count('<g id="cusp') == comps,
              f"{' '.join(args)}: {tiles} triangles in {comps} cusp block(s) (got {n})")
        check(svg(*args)[1] == text, f"{' '.join(args)}: SVG byte-identical rerun")
    _, text = svg("bundle", "--word", "R2LRL")
    check("#bfbfbf" in text and 'class="domain"' in text, "hinge shading and domain outline")

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
