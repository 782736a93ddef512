"""Domain types for the decomposed facial representation and editing-task definitions.

Everything here is plain data: region labels, per-face component vectors, and
task specs that say, component by component, whether an edit draws from the
source face or the target face. No learned parameters live in this module.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum, IntEnum

import numpy as np

from .errors import NotFoundError, ValidationError


class RegionLabel(IntEnum):
    """Per-pixel region labels. The integer ids are stable across file formats."""

    background = 0
    skin = 1
    eyebrows = 2
    eyes = 3
    nose = 4
    lips = 5
    ears = 6
    hair = 7


# Facial texture sub-regions; the head adds ears and hair on top of these.
FACE_AREA = frozenset(
    {RegionLabel.skin, RegionLabel.eyebrows, RegionLabel.eyes, RegionLabel.nose, RegionLabel.lips}
)
HEAD_AREA = frozenset(FACE_AREA | {RegionLabel.ears, RegionLabel.hair})


class Provenance(str, Enum):
    """Which face a component of an assembled representation is copied from."""

    source = "source"
    target = "target"


class RegionImageMode(str, Enum):
    """How the image-level region assembler composes the inpainting reference."""

    whole_source = "whole_source"
    face_swap_composite = "face_swap_composite"
    head_swap_composite = "head_swap_composite"
    custom = "custom"


@dataclass(frozen=True)
class ReprDims:
    """Fixed dimensions of every representation component.

    These are configuration defaults chosen so the total condition length stays
    small; encoders and adapters all read their shapes from one instance.
    """

    identity_tokens: int = 4
    feature_dim: int = 32
    pose_dim: int = 6
    expression_dim: int = 12
    gaze_dim: int = 4
    lighting_dim: int = 4
    texture_dim: int = 8
    ctx_dim: int = 128
    inpaint_tokens: int = 16

    @property
    def representation_tokens(self) -> int:
        # identity tokens + 8 regions + pose/expression/gaze/texture/lighting
        return self.identity_tokens + len(RegionLabel) + 5

    @property
    def condition_tokens(self) -> int:
        return self.representation_tokens + self.inpaint_tokens


DEFAULT_DIMS = ReprDims()


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.asarray(a, dtype=np.float32)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class MotionDescriptor:
    """Pose, expression, and gaze embeddings of one face."""

    pose: np.ndarray
    expression: np.ndarray
    gaze: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pose", _freeze(self.pose))
        object.__setattr__(self, "expression", _freeze(self.expression))
        object.__setattr__(self, "gaze", _freeze(self.gaze))


@dataclass(frozen=True)
class FacialRepresentation:
    """The full decomposed representation of one face.

    ``regions`` always carries all 8 labels; a region absent from the image
    holds the zero vector and ``region_present[label] is False``.
    """

    identity: np.ndarray
    regions: dict[RegionLabel, np.ndarray]
    region_present: dict[RegionLabel, bool]
    lighting: np.ndarray
    texture: np.ndarray
    motion: MotionDescriptor

    def __post_init__(self):
        object.__setattr__(self, "identity", _freeze(self.identity))
        object.__setattr__(self, "lighting", _freeze(self.lighting))
        object.__setattr__(self, "texture", _freeze(self.texture))
        object.__setattr__(
            self, "regions", {RegionLabel(k): _freeze(v) for k, v in self.regions.items()}
        )
        object.__setattr__(
            self, "region_present", {RegionLabel(k): bool(v) for k, v in self.region_present.items()}
        )


def validate_representation(
    r: FacialRepresentation, dims: ReprDims = DEFAULT_DIMS
) -> list[str]:
    """Check shapes and finiteness of every component.

    Returns the list of violations; an empty list means the representation is
    well-formed. Violations are data, not exceptions.
    """
    out: list[str] = []

    def _check(name: str, arr: np.ndarray, shape: tuple[int, ...]) -> None:
        if tuple(arr.shape) != shape:
            out.append(f"{name}: shape {tuple(arr.shape)} != {shape}")
        elif not np.isfinite(arr).all():
            out.append(f"{name}: non-finite values")

    _check("identity", r.identity, (dims.identity_tokens, dims.feature_dim))
    for label in RegionLabel:
        if label not in r.regions:
            out.append(f"regions[{label.name}]: missing")
            continue
        vec = r.regions[label]
        if vec.shape != (dims.feature_dim,):
            out.append(f"regions[{label.name}]: dim {vec.shape[-1] if vec.ndim else 0} != {dims.feature_dim}")
        elif not np.isfinite(vec).all():
            out.append(f"regions[{label.name}]: non-finite values")
        if label not in r.region_present:
            out.append(f"region_present[{label.name}]: missing")
    _check("lighting", r.lighting, (dims.lighting_dim,))
    _check("texture", r.texture, (dims.texture_dim,))
    _check("pose", r.motion.pose, (dims.pose_dim,))
    _check("expression", r.motion.expression, (dims.expression_dim,))
    _check("gaze", r.motion.gaze, (dims.gaze_dim,))
    return out


@dataclass(frozen=True)
class TaskSpec:
    """Per-component provenance map defining one editing task."""

    name: str
    region_provenance: dict[RegionLabel, Provenance]
    identity_provenance: Provenance
    motion_provenance: Provenance
    texture_lighting_provenance: Provenance
    region_image_mode: RegionImageMode

    def __post_init__(self):
        object.__setattr__(
            self,
            "region_provenance",
            {RegionLabel(k): Provenance(v) for k, v in self.region_provenance.items()},
        )
        missing = [l.name for l in RegionLabel if l not in self.region_provenance]
        if missing:
            raise ValidationError(f"region_provenance missing labels: {missing}")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "region_provenance": {
                l.name: self.region_provenance[l].value for l in RegionLabel
            },
            "identity_provenance": self.identity_provenance.value,
            "motion_provenance": self.motion_provenance.value,
            "texture_lighting_provenance": self.texture_lighting_provenance.value,
            "region_image_mode": self.region_image_mode.value,
        }

    def to_json(self) -> str:
        """Canonical JSON (sorted keys); the one wire format for CLI, service, and UI."""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "TaskSpec":
        return cls(
            name=d["name"],
            region_provenance={
                RegionLabel[k]: Provenance(v) for k, v in d["region_provenance"].items()
            },
            identity_provenance=Provenance(d["identity_provenance"]),
            motion_provenance=Provenance(d["motion_provenance"]),
            texture_lighting_provenance=Provenance(d.get("texture_lighting_provenance", "target")),
            region_image_mode=RegionImageMode(d["region_image_mode"]),
        )

    @classmethod
    def from_json(cls, s: str) -> "TaskSpec":
        return cls.from_dict(json.loads(s))


def _provenance_fingerprint(
    region_provenance: dict[RegionLabel, Provenance],
    identity_provenance: Provenance,
    motion_provenance: Provenance,
    texture_lighting_provenance: Provenance,
    region_image_mode: RegionImageMode,
) -> str:
    payload = json.dumps(
        {
            "regions": {l.name: region_provenance[l].value for l in RegionLabel},
            "identity": identity_provenance.value,
            "motion": motion_provenance.value,
            "texture_lighting": texture_lighting_provenance.value,
            "mode": region_image_mode.value,
        },
        sort_keys=True,
    )
    return hashlib.sha1(payload.encode()).hexdigest()[:8]


def _preset(name: str, source_regions: frozenset[RegionLabel], mode: RegionImageMode) -> TaskSpec:
    return TaskSpec(
        name=name,
        region_provenance={
            l: (Provenance.source if l in source_regions else Provenance.target)
            for l in RegionLabel
        },
        identity_provenance=Provenance.source,
        motion_provenance=Provenance.target,
        texture_lighting_provenance=Provenance.target,
        region_image_mode=mode,
    )


# Canonical presets. Identity always follows the source and motion always
# follows the target; they differ in which regions the source contributes and
# in how the inpainting reference is composed.
PRESETS: dict[str, TaskSpec] = {
    "reenactment": _preset("reenactment", frozenset(RegionLabel), RegionImageMode.whole_source),
    "face_swap": _preset("face_swap", FACE_AREA, RegionImageMode.face_swap_composite),
    "head_swap": _preset("head_swap", HEAD_AREA, RegionImageMode.head_swap_composite),
}

_PRESET_BY_FINGERPRINT = {
    _provenance_fingerprint(
        s.region_provenance,
        s.identity_provenance,
        s.motion_provenance,
        s.texture_lighting_provenance,
        s.region_image_mode,
    ): s
    for s in PRESETS.values()
}


def task_preset(name: str) -> TaskSpec:
    """Return the canonical spec for one of the built-in editing tasks."""
    try:
        return PRESETS[name]
    except KeyError:
        raise NotFoundError(
            f"unknown task preset {name!r}; valid presets: {sorted(PRESETS)}"
        ) from None


def custom_task(
    region_provenance: dict[RegionLabel, Provenance],
    identity_provenance: Provenance = Provenance.source,
    motion_provenance: Provenance = Provenance.target,
    region_image_mode: RegionImageMode = RegionImageMode.whole_source,
    texture_lighting_provenance: Provenance = Provenance.target,
) -> TaskSpec:
    """Build a validated task spec from an explicit provenance map.

    The name is derived from the provenance fingerprint; a map that coincides
    with a built-in preset returns that preset unchanged.
    """
    region_provenance = {RegionLabel(k): Provenance(v) for k, v in region_provenance.items()}
    missing = [l.name for l in RegionLabel if l not in region_provenance]
    if missing:
        raise ValidationError(f"region_provenance missing labels: {missing}")
    fp = _provenance_fingerprint(
        region_provenance,
        Provenance(identity_provenance),
        Provenance(motion_provenance),
        Provenance(texture_lighting_provenance),
        RegionImageMode(region_image_mode),
    )
    if fp in _PRESET_BY_FINGERPRINT:
        return _PRESET_BY_FINGERPRINT[fp]
    return TaskSpec(
        name=f"custom-{fp}",
        region_provenance=region_provenance,
        identity_provenance=Provenance(identity_provenance),
        motion_provenance=Provenance(motion_provenance),
        texture_lighting_provenance=Provenance(texture_lighting_provenance),
        region_image_mode=RegionImageMode(region_image_mode),
    )
