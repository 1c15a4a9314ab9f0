"""Write a mesh and a curve for external plotting, then read the curve back."""

import json
import sys
import tempfile
from pathlib import Path

from rhumbforge.cli import run_cli
from rhumbforge.io import read_curve_csv

here = Path(__file__).parent
out = Path(tempfile.mkdtemp(prefix="rhumbforge-"))
scene = json.loads((here / "scene_ex1.json").read_text())
scene["export"]["mesh"] = str(out / "cone.obj")
scene["export"]["curves"] = [str(out / "ex1.csv")]
path = out / "scene.json"
path.write_text(json.dumps(scene, indent=2))

code = run_cli(["surface", "--scene", str(path)])
if code:
    sys.exit(code)
curve = read_curve_csv(out / "ex1.csv")
print(f"{len(curve)} samples read back, final s = {curve.s[-1]:.6f}; files in {out}")
