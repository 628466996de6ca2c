"""
Volume ratio against cone distance
==================================

Random unit-norm frames in R^4 with 6, 11, 15 and 20 vectors.  For every
frame the point (D, V^(4/N)) must fall between the two envelope curves;
the CSV written here has everything needed to draw that picture.
"""
import csv
import sys
import tempfile
from pathlib import Path

from scalekit.cli import main

count = int(sys.argv[1]) if len(sys.argv) > 1 else 200
out = Path(tempfile.gettempdir()) / "scalekit_scan.csv"
main(["scan", "--m-list", "6,11,15,20", "--n", "4", "--count", str(count),
      "--seed", "42", "--out", str(out)])

with open(out, newline="") as fh:
    rows = list(csv.DictReader(fh))

for m in ("6", "11", "15", "20"):
    sel = [r for r in rows if r["m"] == m]
    dist = [float(r["cone_distance"]) for r in sel]
    vol = [float(r["volume_ratio"]) for r in sel]
    share = sum(d < 1e-6 for d in dist) / len(sel)
    print(f"m={m:>2}: mean D {sum(dist) / len(sel):.3f}, mean V {sum(vol) / len(sel):.3f}, "
          f"scalable {share:.1%}")

# how tight is the envelope?  gap between the curves at each observed D
gaps = [float(r["vd_upper"]) - float(r["vd_lower"]) for r in rows
        if 0 < float(r["cone_distance"]) < 1]
print(f"\nenvelope width: median {sorted(gaps)[len(gaps) // 2]:.4f}, max {max(gaps):.4f}")
print(f"rows written to {out}")
