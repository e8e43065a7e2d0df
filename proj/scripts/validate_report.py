#!/usr/bin/env python3
"""Runs the CLI for each command and validates the JSON against the report schema."""
import json
import subprocess
import sys

import jsonschema


def main():
    exe, schema_path = sys.argv[1], sys.argv[2]
    with open(schema_path) as f:
        schema = json.load(f)
    runs = [
        ["list-metrics"],
        ["tensors", "--spec", "randers-curved-n3", "--count", "2"],
        ["classify", "--spec", "quartic-perturbed-n3", "--count", "3"],
        ["verify", "--spec", "randers-n3", "--count", "3"],
        ["verify", "--spec", "sphere-n4", "--count", "2"],
    ]
    for args in runs:
        proc = subprocess.run([exe] + args, capture_output=True, text=True)
        if proc.returncode != 0:
            print(" ".join(args), "exited", proc.returncode, proc.stderr)
            return 1
        jsonschema.validate(json.loads(proc.stdout), schema)
        print("valid:", " ".join(args))
    return 0


if __name__ == "__main__":
    sys.exit(main())
