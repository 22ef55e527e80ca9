"""Regenerate src/boundedgames/data/owf_golden.json."""

import json
from pathlib import Path

from boundedgames.owf import golden_vectors

OUT = Path(__file__).resolve().parents[1] / "src" / "boundedgames" / "data" / "owf_golden.json"

if __name__ == "__main__":
    doc = {"schema": "boundedgames.owf_golden/1", "vectors": golden_vectors()}
    OUT.write_text(json.dumps(doc, indent=1) + "\n")
    print(f"wrote {len(doc['vectors'])} vectors to {OUT}")
