"""Saving machines as JSON and driving them from the command line."""
import io
import tempfile
from pathlib import Path

from qautomata import catalog
from qautomata.cli import main
from qautomata.io import dumps, loads, save

leq = catalog.build_leq_qpda()
text = dumps(leq)
print(text[:200], "...")
assert dumps(loads(text)) == text  # exact round trip

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "leq.json"
    save(leq, path)
    for argv in (["prob", str(path), "abba"], ["coeffs", str(path), "--max-len", "4"], ["check", str(path), "--depth", "4"]):
        out = io.StringIO()
        main(argv, out)
        print("$ qautomata", " ".join(argv[:1] + ["leq.json"] + argv[2:]))
        print(out.getvalue().rstrip())

for name in ["fibonacci", "measurement", "dyck", "leq", "symdiff"]:
    out = io.StringIO()
    main(["demo", name], out)
    print(f"demo {name}: {out.getvalue().strip()!r}")
