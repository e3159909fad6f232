"""Regenerate the committed fixture files. Run from the repository root:

    python3 fixtures/generate.py
"""

from pathlib import Path

import numpy as np

from ebsw.measures import EmpiricalMeasure, save_measure
from ebsw.ppm import write_ppm

HERE = Path(__file__).parent


def ring_target(n: int = 100) -> np.ndarray:
    ang = 2.0 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(ang), np.sin(ang)])


def slicing_pair(n: int = 200, seed: int = 7) -> tuple[np.ndarray, np.ndarray]:
    # nested anisotropic Gaussians: the projected cost stays strictly positive
    # at every angle, so the slicing density is multimodal but has no zeros
    rng = np.random.default_rng(seed)
    mu = rng.standard_normal((n, 2)) * np.array([1.5, 1.2])
    nu = rng.standard_normal((n, 2)) * np.array([0.5, 0.7])
    return mu, nu


def flat_image(h: int, w: int, rgb: tuple[int, int, int]) -> np.ndarray:
    img = np.empty((h, w, 3), dtype=np.uint8)
    img[:] = rgb
    return img


def synthetic_photo(h: int, w: int, warm: bool, seed: int) -> np.ndarray:
    # smooth gradients plus a disc, with a warm or cool palette
    rng = np.random.default_rng(seed)
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    gx = xs / (w - 1)
    gy = ys / (h - 1)
    disc = ((xs - w / 2) ** 2 + (ys - h / 2) ** 2) < (min(h, w) / 3.5) ** 2
    if warm:
        r = 180 + 60 * gx
        g = 90 + 80 * gy
        b = 40 + 30 * gx * gy
        r[disc] = 250
        g[disc] = 200
        b[disc] = 90
    else:
        r = 30 + 40 * gy
        g = 70 + 70 * gx
        b = 140 + 100 * gx * gy
        r[disc] = 60
        g[disc] = 160
        b[disc] = 230
    img = np.stack([r, g, b], axis=-1)
    img += rng.normal(0.0, 3.0, size=img.shape)
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


def main() -> None:
    save_measure(EmpiricalMeasure(ring_target()), HERE / "ring_100.csv")
    mu, nu = slicing_pair()
    save_measure(EmpiricalMeasure(mu), HERE / "slicing_mu.csv")
    save_measure(EmpiricalMeasure(nu), HERE / "slicing_nu.csv")
    write_ppm(HERE / "red_32.ppm", flat_image(32, 32, (255, 0, 0)))
    write_ppm(HERE / "blue_32.ppm", flat_image(32, 32, (0, 0, 255)))
    write_ppm(HERE / "photo_warm_40.ppm", synthetic_photo(40, 40, warm=True, seed=11))
    write_ppm(HERE / "photo_cool_32x48.ppm", synthetic_photo(32, 48, warm=False, seed=12))


if __name__ == "__main__":
    main()
