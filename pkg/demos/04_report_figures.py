"""
Figures and tables from the command line
========================================

Run every pipeline stage through the CLI entry point on a synthetic corpus
and list what each stage wrote.
"""

import sys
import tempfile
from pathlib import Path

from glepoch.cli import main

work = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="glepoch-demo-"))
corpus, out = work / "corpus", work / "out"

# a synthetic corpus in the same three-file layout a real one uses
main(["synth", "--n", "8000", "--seed", "4", "--corpus-dir", str(corpus), "--out", str(out)])

# epochs are label=start:end, months optional
epochs = "A=2003:2004,B=2007:2008,C=2012:2013,D=2018-01:2018-06"
for stage in ("ingest", "extract", "transform", "compare", "report"):
    main([stage, "--corpus-dir", str(corpus), "--out", str(out), "--epochs", epochs])

for stage in ("extract", "transform", "compare", "report"):
    files = sorted(p.relative_to(out) for p in (out / stage).rglob("*") if p.is_file())
    print(f"{stage}: {len(files)} files, e.g. {', '.join(map(str, files[:3]))}")

# the pairwise agreement table and the cohort table are plain CSV
print((out / "compare" / "agreement.csv").read_text())
print((out / "report" / "cohort_table.csv").read_text())
print("SVG figures in", out / "report")
