"""Procedural synthetic face corpus: images, exact parse maps, ground-truth parameters.

Faces are layered 2D primitives (ellipses, wedges, curved bands) rasterized
directly from coordinate math, so the parse map is geometrically exact and
rendering is a pure function of (params, size). Yaw is simulated by shifting
features horizontally and foreshortening the head outline; there is no 3D.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import NotFoundError, ValidationError
from .repr_core import RegionLabel

VALID_SIZES = (32, 64, 128)

COLOR_KEYS = ("skin", "hair", "eyes", "lips", "eyebrows", "background")

YAW_RANGE = (-0.6, 0.6)
LIGHTING_RANGE = (0.5, 1.5)


@dataclass(frozen=True)
class FaceParams:
    """Ground-truth generative parameters of one synthetic face.

    identity[0..7] control head aspect, eye spacing, nose length, lip width,
    brow arch, ear size, hair line, and jaw curvature, each in [-1, 1].
    """

    identity: tuple[float, ...]
    yaw: float
    smile: float
    mouth_open: float
    gaze: tuple[float, float]
    colors: dict[str, tuple[float, float, float]]
    hair_style: int
    lighting: float

    def to_dict(self) -> dict:
        return {
            "identity": list(self.identity),
            "yaw": self.yaw,
            "smile": self.smile,
            "mouth_open": self.mouth_open,
            "gaze": list(self.gaze),
            "colors": {k: list(v) for k, v in self.colors.items()},
            "hair_style": self.hair_style,
            "lighting": self.lighting,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FaceParams":
        return cls(
            identity=tuple(d["identity"]),
            yaw=d["yaw"],
            smile=d["smile"],
            mouth_open=d["mouth_open"],
            gaze=tuple(d["gaze"]),
            colors={k: tuple(v) for k, v in d["colors"].items()},
            hair_style=int(d["hair_style"]),
            lighting=d["lighting"],
        )


def sample_params(seed: int) -> FaceParams:
    """Draw one parameter set; deterministic in the seed."""
    if seed < 0:
        raise ValidationError(f"seed must be >= 0, got {seed}")
    rng = np.random.Generator(np.random.PCG64(seed))
    identity = tuple(float(x) for x in rng.uniform(-1.0, 1.0, 8))
    yaw = float(rng.uniform(*YAW_RANGE))
    smile = float(rng.uniform(-1.0, 1.0))
    mouth_open = float(rng.uniform(0.0, 1.0))
    gaze = (float(rng.uniform(-1.0, 1.0)), float(rng.uniform(-1.0, 1.0)))

    base = float(rng.uniform(0.35, 0.92))
    skin = (base, base * float(rng.uniform(0.72, 0.92)), base * float(rng.uniform(0.52, 0.80)))
    hair = tuple(float(x) for x in rng.uniform(0.05, 0.95, 3))
    eyes = tuple(float(x) for x in rng.uniform(0.05, 0.90, 3))
    lips = (float(rng.uniform(0.40, 0.90)), float(rng.uniform(0.10, 0.50)), float(rng.uniform(0.15, 0.50)))
    brows = tuple(float(np.clip(c * rng.uniform(0.45, 0.85), 0.0, 1.0)) for c in hair)
    background = tuple(float(x) for x in rng.uniform(0.0, 1.0, 3))

    return FaceParams(
        identity=identity,
        yaw=yaw,
        smile=smile,
        mouth_open=mouth_open,
        gaze=gaze,
        colors={
            "skin": skin,
            "hair": hair,
            "eyes": eyes,
            "lips": lips,
            "eyebrows": brows,
            "background": background,
        },
        hair_style=int(rng.integers(0, 4)),
        lighting=float(rng.uniform(*LIGHTING_RANGE)),
    )


def _child_seed(seed: int, tag: int) -> int:
    return int(np.random.SeedSequence([seed, tag]).generate_state(1)[0])


def make_pair(kind: str, seed: int) -> tuple[FaceParams, FaceParams]:
    """Draw a training pair.

    same_identity_motion_change pairs share identity/colors/hair_style/lighting
    and redraw yaw, expression, and gaze; cross_identity pairs are independent.
    """
    if kind == "same_identity_motion_change":
        src = sample_params(seed)
        rng = np.random.Generator(np.random.PCG64(_child_seed(seed, 7)))
        tgt = replace(
            src,
            yaw=float(rng.uniform(*YAW_RANGE)),
            smile=float(rng.uniform(-1.0, 1.0)),
            mouth_open=float(rng.uniform(0.0, 1.0)),
            gaze=(float(rng.uniform(-1.0, 1.0)), float(rng.uniform(-1.0, 1.0))),
        )
        return src, tgt
    if kind == "cross_identity":
        return sample_params(_child_seed(seed, 11)), sample_params(_child_seed(seed, 13))
    raise ValidationError(f"unknown pair kind {kind!r}")


def _ellipse(u, v, u0, v0, a, b):
    return ((u - u0) / a) ** 2 + ((v - v0) / b) ** 2 <= 1.0


def render(params: FaceParams, size: int) -> tuple[np.ndarray, np.ndarray]:
    """Rasterize one face.

    Returns (image, parse): image is HxWx3 float32 in [0, 1], parse is HxW
    uint8 of RegionLabel values. Lighting scales every non-background pixel
    multiplicatively before the final clamp.
    """
    if size not in VALID_SIZES:
        raise ValidationError(f"size must be one of {VALID_SIZES}, got {size}")

    S = size
    c = (S - 1) / 2.0
    ys, xs = np.mgrid[0:S, 0:S]
    u = (xs - c) / S  # +right
    v = (ys - c) / S  # +down

    idn = params.identity
    yaw = params.yaw
    t01 = lambda x: (x + 1.0) / 2.0

    # Head outline; yaw shifts the head a little and the inner features more,
    # and foreshortens the head width.
    fx = 0.10 * yaw
    fy = 0.02
    fw = (0.26 + 0.025 * idn[0]) * (1.0 - 0.18 * abs(yaw))
    fh = 0.34 - 0.02 * idn[0]
    jaw = t01(idn[7])
    taper = 1.0 - 0.10 * jaw * np.clip((v - fy) / fh, 0.0, 1.0)
    face = ((u - fx) / (fw * taper)) ** 2 + ((v - fy) / fh) ** 2 <= 1.0

    cxf = 0.22 * yaw  # feature x-center

    # Hair: a styled outer shape behind the head plus bangs above the hairline.
    style = params.hair_style
    hcy = fy - 0.02
    if style == 0:
        outer = _ellipse(u, v, fx, hcy - 0.03, fw * 1.22, fh * 1.12)
    elif style == 1:
        outer = _ellipse(u, v, fx, hcy, fw * 1.30, fh * 1.15)
        band = (np.abs(u - fx) >= fw * 0.70) & (np.abs(u - fx) <= fw * 1.28)
        outer |= band & (v >= hcy - 0.2) & (v <= fy + fh * 1.08)
    elif style == 2:
        outer = _ellipse(u, v, fx, hcy - 0.07, fw * 1.16, fh * 1.06)
    else:
        outer = _ellipse(u, v, fx, hcy - 0.04, fw * 1.42, fh * 1.32)
    hairline_v = fy - fh + (0.14 + 0.18 * t01(idn[6])) * fh
    bangs = outer & (v <= hairline_v)

    # Ears ride with the head; the far-side ear slides behind it at large yaw.
    er_a = 0.050 + 0.028 * t01(idn[5])
    er_b = 0.075 + 0.032 * t01(idn[5])
    ear_y = fy + 0.02
    ear_dx = 0.12 * yaw
    ears = _ellipse(u, v, fx - fw * 1.02 + ear_dx, ear_y, er_a, er_b) | _ellipse(
        u, v, fx + fw * 1.02 + ear_dx, ear_y, er_a, er_b
    )

    # Eyes and brows.
    ey = fy - 0.38 * fh
    es = fw * (0.42 + 0.16 * t01(idn[1]))
    ea, eb = fw * 0.17, fh * 0.105
    sclera = np.zeros_like(face)
    iris = np.zeros_like(face)
    gx, gy = params.gaze
    for sgn in (-1.0, 1.0):
        ecx = cxf + sgn * es
        sclera |= _ellipse(u, v, ecx, ey, ea, eb)
        iris |= _ellipse(u, v, ecx + gx * fw * 0.055, ey + gy * fh * 0.035, fw * 0.085, fw * 0.085)
    iris &= sclera
    eyes = sclera  # sclera and iris both carry the eyes label

    by = ey - 0.24 * fh
    bw = fw * 0.21
    arch = 0.012 + 0.055 * t01(idn[4])
    tb = max(0.022, 1.2 / S)
    brows = np.zeros_like(face)
    for sgn in (-1.0, 1.0):
        du = u - (cxf + sgn * es)
        curve = by - arch * (1.0 - np.clip(du / bw, -1, 1) ** 2)
        brows |= (np.abs(du) <= bw) & (np.abs(v - curve) <= tb)

    # Nose: a downward-widening wedge.
    ny0 = ey + 0.12 * fh
    ln = fh * (0.30 + 0.18 * t01(idn[2]))
    nw = fw * 0.17
    frac = np.clip((v - ny0) / ln, 0.0, 1.0)
    nose = (v >= ny0) & (v <= ny0 + ln) & (np.abs(u - cxf) <= nw * np.maximum(frac, 0.15))

    # Lips: a curved band; smile bends the corners, mouth_open thickens it.
    my = fy + 0.55 * fh
    lw = fw * (0.30 + 0.14 * t01(idn[3]))
    lh0 = fh * (0.065 + 0.085 * params.mouth_open)
    du = np.clip((u - cxf) / lw, -1.0, 1.0)
    vm = my + params.smile * 0.06 * fh * (0.5 - du**2)
    th = np.maximum(lh0 * np.sqrt(np.maximum(1.0 - du**2, 0.0)), 0.0)
    lips = (np.abs(u - cxf) <= lw) & (np.abs(v - vm) <= th)

    # Paint order: later layers override earlier ones.
    face_inner = face
    parse = np.zeros((S, S), dtype=np.uint8)
    parse[outer] = RegionLabel.hair
    parse[ears] = RegionLabel.ears
    parse[face_inner] = RegionLabel.skin
    parse[bangs] = RegionLabel.hair
    for mask, label in (
        (brows & face_inner, RegionLabel.eyebrows),
        (eyes & face_inner, RegionLabel.eyes),
        (nose & face_inner, RegionLabel.nose),
        (lips & face_inner, RegionLabel.lips),
    ):
        parse[mask] = label

    col = params.colors
    skin = np.array(col["skin"], dtype=np.float32)
    img = np.empty((S, S, 3), dtype=np.float32)
    img[:] = np.array(col["background"], dtype=np.float32)
    img[parse == RegionLabel.hair] = np.array(col["hair"], dtype=np.float32)
    img[parse == RegionLabel.ears] = skin * 0.95
    img[parse == RegionLabel.skin] = skin
    img[parse == RegionLabel.eyebrows] = np.array(col["eyebrows"], dtype=np.float32)
    img[parse == RegionLabel.eyes] = np.array([0.97, 0.97, 0.97], dtype=np.float32)
    img[iris & (parse == RegionLabel.eyes)] = np.array(col["eyes"], dtype=np.float32)
    img[parse == RegionLabel.nose] = skin * 0.80
    img[parse == RegionLabel.lips] = np.array(col["lips"], dtype=np.float32)

    nonbg = parse != RegionLabel.background
    img[nonbg] *= params.lighting
    np.clip(img, 0.0, 1.0, out=img)
    return img, parse


# ---------------------------------------------------------------------------
# On-disk corpus: directory per sample, PNG image + PNG label map + JSON params,
# indexed by a manifest file.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Sample:
    sample_id: str
    seed: int
    params: FaceParams
    image: np.ndarray  # HxWx3 float32 [0,1]
    parse: np.ndarray  # HxW uint8


def image_to_png_bytes(image: np.ndarray) -> bytes:
    from io import BytesIO

    arr = np.clip(np.asarray(image) * 255.0 + 0.5, 0, 255).astype(np.uint8)
    buf = BytesIO()
    Image.fromarray(arr).save(buf, format="PNG")
    return buf.getvalue()


def save_image_png(path: Path, image: np.ndarray) -> None:
    path.write_bytes(image_to_png_bytes(image))


def load_image_png(path: Path) -> np.ndarray:
    arr = np.asarray(Image.open(path).convert("RGB"), dtype=np.float32)
    return arr / 255.0


def write_dataset(out_dir: str | Path, n: int, seed: int, size: int) -> dict:
    """Generate n samples with seeds seed..seed+n-1 and write the corpus layout."""
    if size not in VALID_SIZES:
        raise ValidationError(f"size must be one of {VALID_SIZES}, got {size}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for i in range(n):
        sid = f"s{i:06d}"
        s = seed + i
        params = sample_params(s)
        image, parse = render(params, size)
        d = out / sid
        d.mkdir(exist_ok=True)
        save_image_png(d / "image.png", image)
        Image.fromarray(parse, mode="L").save(d / "parse.png")
        (d / "params.json").write_text(json.dumps(params.to_dict(), sort_keys=True))
        entries.append({"id": sid, "seed": s, "dir": sid})
    manifest = {"size": size, "n": n, "base_seed": seed, "samples": entries}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True))
    return manifest


class SampleStore:
    """Read access to a written corpus directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        manifest_path = self.root / "manifest.json"
        if not manifest_path.exists():
            raise NotFoundError(f"no manifest.json under {self.root}")
        self.manifest = json.loads(manifest_path.read_text())
        self._by_id = {e["id"]: e for e in self.manifest["samples"]}

    @property
    def size(self) -> int:
        return self.manifest["size"]

    def ids(self) -> list[str]:
        return [e["id"] for e in self.manifest["samples"]]

    def __len__(self) -> int:
        return len(self._by_id)

    def load(self, sample_id: str) -> Sample:
        if sample_id not in self._by_id:
            raise NotFoundError(f"unknown sample id {sample_id!r}")
        entry = self._by_id[sample_id]
        d = self.root / entry["dir"]
        params = FaceParams.from_dict(json.loads((d / "params.json").read_text()))
        image = load_image_png(d / "image.png")
        parse = np.asarray(Image.open(d / "parse.png"), dtype=np.uint8)
        return Sample(sample_id, entry["seed"], params, image, parse)
