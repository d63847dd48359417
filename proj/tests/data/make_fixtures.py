"""Regenerates the PNG fixtures and their Pillow-decoded reference values."""
import numpy as np
from PIL import Image

rng = np.random.default_rng(7)

rgb = rng.integers(0, 256, (4, 5, 3), dtype=np.uint8)
Image.fromarray(rgb, "RGB").save("rgb_5x4.png")
rgba = rng.integers(0, 256, (3, 3, 4), dtype=np.uint8)
Image.fromarray(rgba, "RGBA").save("rgba_3x3.png")
gray = rng.integers(0, 256, (2, 3), dtype=np.uint8)
Image.fromarray(gray, "L").save("gray_3x2.png")
gray16 = rng.integers(0, 65536, (2, 2), dtype=np.uint16)
Image.fromarray(gray16.astype(np.int32), "I").convert("I;16").save("gray16_2x2.png")


def dump(name, mode):
    im = Image.open(name)
    w, h = im.size
    if mode == "16":
        vals = [v * 255.0 / 65535.0 for v in np.asarray(im, dtype=np.uint16).ravel()]
        dim = 1
    else:
        im = im.convert(mode)
        arr = np.asarray(im, dtype=np.float64)
        dim = 1 if arr.ndim == 2 else arr.shape[2]
        vals = arr.ravel().tolist()
    with open(name.replace(".png", ".txt"), "w") as f:
        f.write(f"{w} {h} {dim}\n")
        f.write(" ".join(repr(float(v)) for v in vals) + "\n")


dump("rgb_5x4.png", "RGB")
dump("rgba_3x3.png", "RGB")
dump("gray_3x2.png", "L")
dump("gray16_2x2.png", "16")
