import subprocess
import sys

import numpy as np
import pytest
from PIL import Image

from rgtv_deblur import io
from rgtv_deblur.cli import main
from rgtv_deblur.conv import read_kernel, write_kernel
from rgtv_deblur.errors import ImageIOError
from rgtv_deblur.synth import motion_kernel, piecewise_constant_image


class TestImageIO:
    def test_extremes(self, tmp_path):
        path = tmp_path / "e.png"
        Image.fromarray(np.array([[0, 255]], np.uint8), "L").save(path)
        assert io.read_image(path).tolist() == [[0.0, 1.0]]

    @pytest.mark.parametrize("suffix", [".png", ".pgm"])
    def test_round_trip(self, tmp_path, suffix):
        img = np.random.default_rng(0).random((13, 17))
        path = tmp_path / f"r{suffix}"
        io.save_image(img, path)
        assert np.max(np.abs(io.load_image(path) - img)) <= 1 / 255

    def test_sixteen_bit(self, tmp_path):
        img = np.random.default_rng(1).random((9, 9))
        path = tmp_path / "w.png"
        io.save_image(img, path, bits=16)
        assert np.max(np.abs(io.read_image(path) - img)) <= 0.5 / 65535 + 1e-12

    def test_colour(self, tmp_path):
        rgb = np.random.default_rng(2).random((6, 7, 3))
        path = tmp_path / "c.png"
        io.save_image(rgb, path)
        assert io.read_image(path).shape == (6, 7, 3)
        gray = io.load_image(path)
        expected = io.read_image(path) @ np.array([0.299, 0.587, 0.114])
        np.testing.assert_allclose(gray, expected, atol=1e-12)

    def test_missing(self, tmp_path):
        with pytest.raises(ImageIOError) as info:
            io.read_image(tmp_path / "nope.png")
        assert "nope.png" in str(info.value)

    def test_corrupt(self, tmp_path):
        path = tmp_path / "bad.png"
        path.write_bytes(b"not an image")
        with pytest.raises(ImageIOError):
            io.read_image(path)

    def test_bad_suffix(self, tmp_path):
        with pytest.raises(ImageIOError):
            io.save_image(np.zeros((3, 3)), tmp_path / "x.jpg")

    def test_kernel_image(self, tmp_path):
        path = tmp_path / "k.pgm"
        io.save_kernel_image(motion_kernel(5, 0), path)
        assert io.read_image(path).max() == 1.0


@pytest.fixture
def images(tmp_path):
    sharp = tmp_path / "sharp.png"
    io.save_image(piecewise_constant_image(48), sharp)
    return tmp_path, sharp


def run(*argv):
    return main([str(a) for a in argv])


class TestCli:
    def test_blur_and_psnr(self, images, capsys):
        d, sharp = images
        out = d / "blurry.png"
        assert run("blur", "--input", sharp, "--kernel", "builtin:motion:5,30",
                   "--noise-sigma", 0.01, "--seed", 3, "--output", out) == 0
        assert run("psnr", sharp, sharp) == 0
        assert capsys.readouterr().out.strip() == "inf"
        assert run("psnr", sharp, out) == 0
        text = capsys.readouterr().out.strip()
        assert float(text) > 10 and len(text.split(".")[1]) == 4

    def test_blur_is_deterministic(self, images):
        d, sharp = images
        for name in ("a.png", "b.png"):
            run("blur", "--input", sharp, "--kernel", "builtin:gaussian:1.0",
                "--noise-sigma", 0.02, "--seed", 9, "--output", d / name)
        assert (d / "a.png").read_bytes() == (d / "b.png").read_bytes()

    def test_blur_with_kernel_file(self, images):
        d, sharp = images
        write_kernel(motion_kernel(3, 0), d / "k.txt")
        assert run("blur", "--input", sharp, "--kernel", d / "k.txt", "--output", d / "o.pgm") == 0

    def test_deblur(self, images):
        d, sharp = images
        blurry = d / "blurry.png"
        run("blur", "--input", sharp, "--kernel", "builtin:motion:3,0", "--output", blurry)
        cfg = d / "run.cfg"
        cfg.write_text("max_outer_iters = 3\n")
        code = run("deblur", "--input", blurry, "--kernel-size", 3, "--output", d / "r.png",
                   "--kernel-out", d / "k.txt", "--config", cfg, "--trace", d / "t.csv",
                   "--kernel-pgm", d / "k.pgm")
        assert code == 0
        assert read_kernel(d / "k.txt").shape == (3, 3)
        assert (d / "t.csv").read_text().startswith("outer,inner,objective,primal_residual\n")
        assert io.read_image(d / "r.png").shape == (48, 48)

    def test_kernel_estimate(self, images):
        d, sharp = images
        blurry = d / "b.png"
        run("blur", "--input", sharp, "--kernel", "builtin:motion:5,0", "--output", blurry)
        assert run("kernel-estimate", "--sharp", sharp, "--blurry", blurry, "--kernel-size", 5,
                   "--mu", 0.01, "--output", d / "k.txt") == 0
        k = read_kernel(d / "k.txt")
        assert k[2].sum() > 0.7

    def test_analyze(self, images):
        d, sharp = images
        out = d / "h.csv"
        assert run("analyze", "--input", sharp, "--region", "0,0,24,24", "--bins", 10, "--output", out) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "bin_lo,bin_hi,count" and len(lines) == 12
        assert lines[-1].startswith("mid_band_fraction,")

    @pytest.mark.parametrize("argv", [
        [],
        ["frobnicate"],
        ["deblur", "--input", "x.png"],
        ["deblur", "--input", "x.png", "--kernel-size", "4", "--output", "o.png", "--kernel-out", "k.txt"],
        ["blur", "--input", "x.png", "--kernel", "builtin:blob:1", "--output", "o.png"],
        ["analyze", "--input", "x.png", "--region", "1,2,3", "--output", "o.csv"],
    ])
    def test_usage_errors(self, argv, capsys):
        assert run(*argv) == 1

    def test_unknown_config_key(self, images):
        d, sharp = images
        cfg = d / "bad.cfg"
        cfg.write_text("lambda = 3\n")
        assert run("deblur", "--input", sharp, "--kernel-size", 3, "--output", d / "r.png",
                   "--kernel-out", d / "k.txt", "--config", cfg) == 1

    def test_io_errors(self, images):
        d, sharp = images
        assert run("psnr", d / "missing.png", sharp) == 2
        assert run("blur", "--input", sharp, "--kernel", d / "missing.txt", "--output", d / "o.png") == 2
        assert run("blur", "--input", sharp, "--kernel", "builtin:disk:1", "--output", d / "no" / "o.png") == 2

    def test_solver_failure(self, tmp_path):
        flat = tmp_path / "flat.png"
        io.save_image(np.full((16, 16), 0.5), flat)
        assert run("kernel-estimate", "--sharp", flat, "--blurry", flat, "--kernel-size", 3,
                   "--output", tmp_path / "k.txt") == 3

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "rgtv_deblur", "--help"], capture_output=True, text=True)
        assert proc.returncode == 0
        for sub in ("blur", "deblur", "kernel-estimate", "analyze", "psnr"):
            assert sub in proc.stdout
