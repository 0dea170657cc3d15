"""Write 512x512 8-bit grayscale PGM carriers from scikit-image's bundled samples."""
import sys
from pathlib import Path

import numpy as np
from skimage import color, data, transform, util

SAMPLES = ["astronaut", "brick", "camera", "coffee", "grass", "gravel", "hubble_deep_field", "moon", "retina", "rocket"]


def to_square_gray(img, side=512):
    if img.ndim == 3:
        img = color.rgb2gray(img[..., :3])
    img = util.img_as_float(img)
    h, w = img.shape
    scale = side / min(h, w)
    if scale != 1.0:
        img = transform.resize(img, (round(h * scale), round(w * scale)), anti_aliasing=True)
    h, w = img.shape
    y0, x0 = (h - side) // 2, (w - side) // 2
    return util.img_as_ubyte(np.clip(img[y0:y0 + side, x0:x0 + side], 0, 1))


def main(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in SAMPLES:
        img = to_square_gray(getattr(data, name)())
        with open(out / f"{name}.pgm", "wb") as f:
            f.write(b"P5 512 512 255\n")
            f.write(img.tobytes())
        print(name, img.shape, img.dtype)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/carriers")
