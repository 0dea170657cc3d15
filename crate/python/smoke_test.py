"""Builds the extension module and exercises it end to end.

Usage: python3 python/smoke_test.py [--no-build]
"""

import math
import os
import shutil
import subprocess
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def build_module(dest):
    if "--no-build" not in sys.argv:
        subprocess.run(["cargo", "build", "--release", "-p", "aqsm-py"], cwd=ROOT, check=True)
    lib = os.path.join(ROOT, "target", "release", "libaqsm.so")
    shutil.copy(lib, os.path.join(dest, "aqsm.so"))
    sys.path.insert(0, dest)


def main():
    tmp = tempfile.mkdtemp()
    build_module(tmp)
    import aqsm

    with open(os.path.join(ROOT, "data", "carriers", "camera.pgm"), "rb") as f:
        carrier = aqsm.Image.from_pgm(f.read())
    assert carrier.side == 512

    logo = aqsm.synthetic_logo(128, 0.8)
    stego, key = aqsm.embed(carrier, logo)
    assert key.r == 2, key
    key = aqsm.Key.from_json(key.to_json())
    assert aqsm.extract(stego, key) == logo

    m = aqsm.metrics(carrier, stego)
    assert m["psnr"] > 50 and m["ssim"] > 0.99, m
    assert math.isinf(aqsm.metrics(carrier, carrier)["psnr"])

    noisy = aqsm.salt_pepper(stego, 0.1, seed=1)
    ncc = aqsm.metrics(logo, aqsm.extract(noisy, key))["ncc"]
    assert ncc > 0.9, ncc
    cropped = aqsm.crop(carrier, 0.25)
    assert cropped.get(255, 255) == 0

    assert aqsm.capacity(2) == (1, 16)
    assert aqsm.scale_plan(3)["copies_high"] == 9

    img = aqsm.Image(2, bytes([0, 1, 2, 3]))
    assert aqsm.Image.from_pgm(img.to_pgm()) == img
    try:
        aqsm.embed(carrier, carrier)
    except aqsm.AqsmError as e:
        assert str(e).startswith("unsupported-scale"), e
    else:
        raise AssertionError("equal sizes accepted")

    suites = aqsm.verify_circuits()
    assert suites and all(ok for _, ok, _, _ in suites)

    print(f"smoke test passed: r={key.r} psnr={m['psnr']:.2f} ncc@0.1={ncc:.4f} suites={len(suites)}")


if __name__ == "__main__":
    main()
