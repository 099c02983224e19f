"""Walk the command-line surface end to end.

Generates an input image, then shells out to the installed ``rarecode``
entry point (via ``python -m rarecode``) for: config echo, dictionary
learning, atom atlas rendering, enhancement, both saliency maps, and the
synthetic benchmark. Every artifact lands under demos/output/cli/.
"""

import subprocess
import sys
from pathlib import Path

from rarecode import write_pgm
from rarecode.synthetic import tiled_texture_image

OUT = Path(__file__).parent / "output" / "cli"
OUT.mkdir(parents=True, exist_ok=True)


def run(*args):
    cmd = [sys.executable, "-m", "rarecode", *args]
    print(f"\n$ rarecode {' '.join(args)}")
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.stdout:
        print(proc.stdout.rstrip())
    if proc.returncode != 0:
        print(proc.stderr.rstrip())
        raise SystemExit(f"command failed with status {proc.returncode}")


img, _, _ = tiled_texture_image(seed=9)
src = OUT / "scene.pgm"
src.write_bytes(write_pgm(img))
print(f"wrote input scene to {src}")

run("enhance", "--print-config")

small = ["--K", "32", "--iters", "3", "--T", "4", "--seed", "9"]
run("learn", "--in", str(src), "--dict", str(OUT / "scene.rdct"), *small)
run("dict-atlas", "--dict", str(OUT / "scene.rdct"), "--out", str(OUT / "atlas.pgm"))
run(
    "enhance", "--in", str(src), "--out", str(OUT / "boosted.pgm"), *small,
    "--transform", "sigmoid", "--sigmoid-a", "-12", "--sigmoid-b", "0.3",
)
run("saliency", "--in", str(src), "--out", str(OUT / "saliency.pgm"), *small)
run("itti", "--in", str(src), "--out", str(OUT / "itti.pgm"))
run("eval-synthetic", "--seed", "1", "--trials", "10")

print(f"\nall artifacts under {OUT}")
