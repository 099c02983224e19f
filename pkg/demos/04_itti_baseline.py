"""Center-surround baseline next to the rarity detector.

A bright disk on a dark background is the classic pop-out stimulus: the
pyramid baseline finds it from local intensity and orientation contrast,
while the rarity pipeline finds it because the disk's patches need atoms
the background never uses. Both maps are saved for a side-by-side look.
"""

from pathlib import Path

import numpy as np

from rarecode import evaluate_saliency, itti_lite, saliency_map, write_pgm
from rarecode.synthetic import benchmark_config, disk_image

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

img, mask = disk_image((128, 128), center=(48.0, 80.0), radius=8.0, fg=0.85, bg=0.15)
print("scene: bright disk at (48, 80), radius 8")

baseline = itti_lite(img)
r, c = divmod(int(np.argmax(baseline)), 128)
print(f"\nbaseline argmax at ({r}, {c}); inside disk: {bool(mask[r, c])}")
print(f"baseline AUC: {evaluate_saliency(baseline, mask).auc:.4f}")

rarity = saliency_map(img, benchmark_config(seed=4))
r, c = divmod(int(np.argmax(rarity)), 128)
print(f"\nrarity argmax at ({r}, {c}); inside disk: {bool(mask[r, c])}")
print(f"rarity AUC: {evaluate_saliency(rarity, mask).auc:.4f}")

(OUT / "disk_scene.pgm").write_bytes(write_pgm(img))
(OUT / "disk_itti.pgm").write_bytes(write_pgm(baseline))
(OUT / "disk_rarity.pgm").write_bytes(write_pgm(rarity))
print(f"\nwrote disk_scene.pgm, disk_itti.pgm, disk_rarity.pgm under {OUT}")
