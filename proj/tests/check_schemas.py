"""Runs simulate and calibrate for every method and validates the JSON outputs."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def main():
    cli, config, schemas = sys.argv[1], sys.argv[2], pathlib.Path(sys.argv[3])
    report_schema = json.loads((schemas / "report.schema.json").read_text())
    manifest_schema = json.loads((schemas / "manifest.schema.json").read_text())
    for schema in (report_schema, manifest_schema):
        jsonschema.Draft202012Validator.check_schema(schema)
    with tempfile.TemporaryDirectory() as tmp:
        for method in ("reflection", "rabi", "mollow", "mixing"):
            out = pathlib.Path(tmp) / method
            subprocess.run([cli, "simulate", "--config", config, "--method", method, "--out", str(out)],
                           check=True, stdout=subprocess.DEVNULL)
            subprocess.run([cli, "calibrate", "--config", config, "--data", str(out)],
                           check=True, stdout=subprocess.DEVNULL)
            jsonschema.validate(json.loads((out / "manifest.json").read_text()), manifest_schema,
                                cls=jsonschema.Draft202012Validator)
            jsonschema.validate(json.loads((out / "report.json").read_text()), report_schema,
                                cls=jsonschema.Draft202012Validator)
            print(f"{method}: manifest and report valid")


if __name__ == "__main__":
    main()
