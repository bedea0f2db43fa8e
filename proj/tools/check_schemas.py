"""Validates the fixture grammars and a structured run against docs/*.schema.json.

usage: check_schemas.py <repo root> <dcxg binary>
"""
import json
import subprocess
import sys
from pathlib import Path

import jsonschema


def main():
    root, binary = Path(sys.argv[1]), sys.argv[2]
    grammar_schema = json.loads((root / "docs/grammar.schema.json").read_text())
    output_schema = json.loads((root / "docs/output.schema.json").read_text())
    for name in ("dcxg.json", "inflated_fan.json"):
        jsonschema.validate(json.loads((root / "fixtures" / name).read_text()), grammar_schema)

    fixtures = root / "fixtures"
    run = subprocess.run(
        [binary, "--grammar", str(fixtures / "dcxg.json"), "--vectors", str(fixtures / "vectors.txt"),
         "--file", str(fixtures / "corpus.txt"), "--structured"],
        check=True, capture_output=True, text=True)
    doc = json.loads(run.stdout)
    jsonschema.validate(doc, output_schema)
    # Round trip: re-serializing the parsed document gives the same value.
    if json.loads(json.dumps(doc)) != doc:
        sys.exit("structured output does not round-trip")
    print(f"ok: 2 grammars, {len(doc['sentences'])} interpretations")


if __name__ == "__main__":
    main()
