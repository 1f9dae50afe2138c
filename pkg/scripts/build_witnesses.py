"""Regenerate the shipped witness registry (src/pptsquare/witnesses)."""

import json
from fractions import Fraction
from pathlib import Path

from pptsquare.channel import (
    breuer_hall_map,
    generalized_choi_map,
    identity_map,
    reduction_map,
    transpose_map,
)
from pptsquare.io import write_map

OUT = Path(__file__).resolve().parents[1] / "src" / "pptsquare" / "witnesses"

ENTRIES = []
for n in (2, 3, 4):
    ENTRIES.append((f"transpose_{n}", transpose_map(n), "completely_copositive",
                    f"transpose map on M_{n}"))
    ENTRIES.append((f"identity_{n}", identity_map(n), "completely_positive",
                    f"identity map on M_{n}"))
for n in (3, 4):
    ENTRIES.append((f"reduction_{n}", reduction_map(n), "completely_copositive",
                    f"reduction map tr(x)I - x on M_{n}"))
ENTRIES.append(("half_reduction_4", reduction_map(4, Fraction(1, 2)), "completely_copositive",
                "tr(x)I - x/2 on M_4"))
ENTRIES.append(("choi_map_3", generalized_choi_map(2, 1, 0), "indecomposable_candidate",
                "generalized Choi map with weights (2, 1, 0) on M_3"))
ENTRIES.append(("breuer_hall_4", breuer_hall_map(4), "indecomposable_candidate",
                "Breuer-Hall map tr(x)I - x - U x^T U^* on M_4"))


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    manifest = []
    for label, phi, kind, prov in ENTRIES:
        write_map(phi, OUT / f"{label}.json")
        manifest.append({"file": f"{label}.json", "label": label,
                         "classification": kind, "provenance": prov})
    (OUT / "manifest.json").write_text(json.dumps({"witnesses": manifest}, indent=2) + "\n")


if __name__ == "__main__":
    main()
