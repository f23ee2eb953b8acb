"""Oracle for the published category-distribution evenness check.

Computes Shannon entropy (nats) and chi-square against uniform for every
column of the percentage table with scipy, independently of the package,
and freezes the results to JSON. Rerun only if the fixture changes:

    python3 tests/oracles/published_entropy.py
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from scipy.stats import chisquare, entropy

HERE = Path(__file__).resolve().parent
FIXTURE = HERE.parent / "fixtures" / "published_percentages.tsv"
OUTPUT = HERE.parent / "fixtures" / "published_entropy.json"


def main() -> None:
    with open(FIXTURE, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh, delimiter="\t"))
    header, body = rows[0], rows[1:]
    result = {}
    for j, name in enumerate(header[1:], 1):
        column = [float(r[j]) for r in body]
        result[name] = {
            "entropy_nats": float(entropy(column)),
            "chi_square_uniform": float(chisquare(column).statistic),
            "column_sum": round(sum(column), 6),
        }
    OUTPUT.write_text(json.dumps(result, indent=2) + "\n", encoding="utf-8")
    for name, vals in result.items():
        print(f"{name:<22} H={vals['entropy_nats']:.6f}  chi2={vals['chi_square_uniform']:.4f}")


if __name__ == "__main__":
    main()
