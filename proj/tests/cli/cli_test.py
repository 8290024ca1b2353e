"""CLI contract: schema validity of JSON outputs, determinism, exit codes."""

import json
import os
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource

BINARY, SOURCE = sys.argv[1], pathlib.Path(sys.argv[2])
SCHEMAS = SOURCE / "schemas"
MODELS = SOURCE / "models"

registry = Registry()
for path in SCHEMAS.glob("*.schema.json"):
    registry = registry.with_resource(path.name, Resource.from_contents(json.loads(path.read_text())))

ENV = dict(os.environ, SOURCE_DATE_EPOCH="1700000000")
failures = []


def run(args, expect=0):
    proc = subprocess.run([BINARY, *args], capture_output=True, text=True, env=ENV)
    if proc.returncode != expect:
        failures.append(f"{' '.join(args)}: exit {proc.returncode}, expected {expect}\n{proc.stderr}")
    return proc.stdout


def validate(schema, text, label):
    try:
        doc = json.loads(text)
        validator = jsonschema.Draft202012Validator(
            registry.contents(schema), registry=registry)
        validator.validate(doc)
    except (json.JSONDecodeError, jsonschema.ValidationError) as e:
        failures.append(f"{label}: {e}")


xz, rabi, flux = str(MODELS / "xz.json"), str(MODELS / "rabi.json"), str(MODELS / "fluxonium.json")
cases = [
    ("coeffs.schema.json", ["coeffs", "--kind", "heff", "--order", "5", "--format", "json"]),
    ("coeffs.schema.json", ["coeffs", "--kind", "w", "--order", "4", "--format", "json"]),
    ("heff.schema.json", ["heff", "--model", xz, "--order", "4"]),
    ("processes.schema.json", ["processes", "--model", rabi, "--order", "5"]),
    ("resonance.schema.json", ["resonance", "--model", rabi, "--order", "3"]),
    ("evolve.schema.json", ["evolve", "--model", rabi, "--order", "3", "--w-order", "2", "--t-end", "20",
                            "--format", "json"]),
    ("oracle.schema.json", ["oracle", "--model", rabi, "--t-end", "20", "--format", "json"]),
    ("sweep.schema.json", ["sweep", "--model", rabi, "--amplitudes", "0.05", "--order", "5", "--format", "json"]),
    ("pulse.schema.json", ["pulse", "--model", flux, "--orders", "5,4,2"]),
]
for schema, args in cases:
    first = run(args)
    validate(schema, first, " ".join(args[:1]))
    if run(args) != first:
        failures.append(f"{args[0]}: rerun is not byte-identical")

# coefficient table row counts
if len(run(["coeffs", "--kind", "heff", "--order", "5"]).splitlines()) != 29:
    failures.append("coeffs --order 5 must print 28 rows plus a header")

# heff of the XZ model at second order
doc = json.loads(run(["heff", "--model", xz, "--order", "2"]))
delta0 = doc["orders"][1]["stark_shifts"][0]
if abs(delta0 - (-4 * 0.01**2 / (3 * 0.5))) > 1e-15:
    failures.append(f"XZ delta_0^(2) = {delta0}")

with tempfile.TemporaryDirectory() as tmp:
    out = os.path.join(tmp, "x.csv")
    run(["evolve", "--model", rabi, "--order", "3", "--t-end", "10", "--out", out])
    manifest = pathlib.Path(out + ".manifest.json").read_text()
    validate("manifest.schema.json", manifest, "evolve manifest")
    bad = os.path.join(tmp, "bad.json")
    pathlib.Path(bad).write_text(json.dumps({"type": "xz", "parameters": {"omega01": 1, "omega_y": 1}}))
    run(["heff", "--model", bad], expect=2)
    run(["heff", "--model", xz, "--order", "0"], expect=2)
    run(["pulse", "--model", flux, "--orders", "7,4,3"], expect=2)
    run(["nonsense"], expect=2)
    # A/2pi = 0.1 fails the ramp convergence check
    strong = os.path.join(tmp, "strong.json")
    flux_doc = json.loads(pathlib.Path(flux).read_text())
    flux_doc["parameters"]["amplitude"] = 0.6283185307179586
    pathlib.Path(strong).write_text(json.dumps(flux_doc))
    run(["pulse", "--model", strong], expect=3)

for f in failures:
    print("FAIL:", f)
print("cli contract:", "ok" if not failures else f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
