"""Immutable value types describing a scene manifest.

Every dataclass field name doubles as the manifest key, and every union of
variant dataclasses is written with a ``type`` discriminator, so the loader
and the serializer are driven entirely by these annotations.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Union

from ..codec import register_variants
from ..narrative.model import NarrativeGraph
from ..values import Placement, Vec2, Vec3, finite, require

SCHEMA_VERSION = 1
INCH_M = 0.0254

Color = tuple[int, int, int]

_require = require
_finite = finite


class SceneKind(str, enum.Enum):
    PANORAMA = "Panorama"
    RECONSTRUCTED = "Reconstructed"


class AxisLock(str, enum.Enum):
    CYLINDRICAL = "Cylindrical"
    SPHERICAL = "Spherical"


@dataclass(frozen=True)
class MuralSource:
    source_id: str
    image: str
    physical_width_m: float
    physical_height_m: float
    dpi: int

    def __post_init__(self):
        _require(_finite(self.physical_width_m) and self.physical_width_m > 0,
                 "physical_width_m", "must be > 0")
        _require(_finite(self.physical_height_m) and self.physical_height_m > 0,
                 "physical_height_m", "must be > 0")
        _require(self.dpi > 0, "dpi", "must be > 0")

    def expected_pixel_size(self) -> tuple[int, int]:
        """Pixel dimensions implied by the physical size at the declared dpi."""
        return (round(self.physical_width_m / INCH_M * self.dpi),
                round(self.physical_height_m / INCH_M * self.dpi))


# -- transfers -----------------------------------------------------------


@dataclass(frozen=True)
class FaceToEye:
    # None is resolved by SliceSpec: Spherical for "cloud"-tagged slices
    axis_lock: Optional[AxisLock] = None


@dataclass(frozen=True)
class Cross:
    pass


@dataclass(frozen=True)
class ArchitectureRef:
    arch_id: str


@dataclass(frozen=True)
class SkyboxBand:
    pass


TransferKind = Union[FaceToEye, Cross, ArchitectureRef, SkyboxBand]


# -- dynamic effects (metadata only) ---------------------------------------


@dataclass(frozen=True)
class Flip:
    period_s: float

    def __post_init__(self):
        _require(_finite(self.period_s) and self.period_s > 0, "period_s", "must be > 0")


@dataclass(frozen=True)
class Bob:
    amplitude_m: float
    period_s: float

    def __post_init__(self):
        _require(_finite(self.amplitude_m) and self.amplitude_m >= 0,
                 "amplitude_m", "must be >= 0")
        _require(_finite(self.period_s) and self.period_s > 0, "period_s", "must be > 0")


@dataclass(frozen=True)
class Pulse:
    min_scale: float
    max_scale: float
    period_s: float

    def __post_init__(self):
        _require(_finite(self.min_scale) and self.min_scale > 0, "min_scale", "must be > 0")
        _require(_finite(self.max_scale) and self.max_scale >= self.min_scale,
                 "max_scale", "must be >= min_scale")
        _require(_finite(self.period_s) and self.period_s > 0, "period_s", "must be > 0")


DynamicEffect = Union[Flip, Bob, Pulse]


@dataclass(frozen=True)
class SliceSpec:
    slice_id: str
    source_id: str
    mask: tuple[Vec2, ...]
    transfer: TransferKind
    placement: Optional[Placement] = None
    effects: tuple[DynamicEffect, ...] = ()
    tags: tuple[str, ...] = ()

    def __post_init__(self):
        _require(len(self.mask) >= 3, "mask", "polygon needs at least 3 vertices")
        _require(all(_finite(*p) for p in self.mask), "mask", "vertices must be finite")
        if isinstance(self.transfer, FaceToEye) and self.transfer.axis_lock is None:
            lock = AxisLock.SPHERICAL if "cloud" in self.tags else AxisLock.CYLINDRICAL
            object.__setattr__(self, "transfer", FaceToEye(lock))


# -- architecture ----------------------------------------------------------


@dataclass(frozen=True)
class RoofSpec:
    overhang_m: float
    rise_m: float
    roof_slice_id: str

    def __post_init__(self):
        _require(_finite(self.overhang_m) and self.overhang_m >= 0, "overhang_m", "must be >= 0")
        _require(_finite(self.rise_m) and self.rise_m >= 0, "rise_m", "must be >= 0")
        _require(self.rise_m > 0 or self.overhang_m == 0, "rise_m",
                 "an overhanging roof needs rise_m > 0")


@dataclass(frozen=True)
class Storey:
    height_m: float
    wall_slice_id: str
    roof: Optional[RoofSpec] = None

    def __post_init__(self):
        _require(_finite(self.height_m) and self.height_m > 0, "height_m", "must be > 0")


@dataclass(frozen=True)
class ViewCalibration:
    """Pinhole viewpoint (architecture-local frame) and the slice's rectangle.

    ``image_rect`` is ``(x0, y0, x1, y1)`` on the virtual image plane, in
    units where the vertical field of view spans y in [-1, 1], +y up.
    """

    eye: Vec3
    look_at: Vec3
    vertical_fov: float
    image_rect: tuple[float, float, float, float]

    def __post_init__(self):
        _require(_finite(*self.eye), "eye", "must be finite")
        _require(_finite(*self.look_at), "look_at", "must be finite")
        _require(self.eye != self.look_at, "look_at", "must differ from eye")
        _require(_finite(self.vertical_fov) and 0 < self.vertical_fov < math.pi,
                 "vertical_fov", "must be in (0, pi)")
        x0, y0, x1, y1 = self.image_rect
        _require(_finite(x0, y0, x1, y1) and x1 > x0 and y1 > y0,
                 "image_rect", "must be (x0, y0, x1, y1) with x1 > x0 and y1 > y0")


@dataclass(frozen=True)
class ArchitectureSpec:
    arch_id: str
    width_m: float
    depth_m: float
    storeys: tuple[Storey, ...]
    placement: Placement = Placement()
    calibration: Optional[ViewCalibration] = None
    match_threshold: float = 0.85

    def __post_init__(self):
        _require(_finite(self.width_m) and self.width_m > 0, "width_m", "must be > 0")
        _require(_finite(self.depth_m) and self.depth_m > 0, "depth_m", "must be > 0")
        _require(len(self.storeys) >= 1, "storeys", "at least one storey is required")
        _require(0.0 <= self.match_threshold <= 1.0, "match_threshold", "must be in [0, 1]")

    @property
    def total_height_m(self) -> float:
        return sum(s.height_m + (s.roof.rise_m if s.roof else 0.0) for s in self.storeys)

    @property
    def max_overhang_m(self) -> float:
        return max((s.roof.overhang_m for s in self.storeys if s.roof), default=0.0)


# -- skybox ------------------------------------------------------------------

# Placeholder hues after the mural's palette; not measured values.
DEFAULT_SKY_TOP: Color = (186, 222, 170)
DEFAULT_SKY_HORIZON: Color = (238, 170, 96)
DEFAULT_GROUND: Color = (122, 86, 52)


def _valid_color(c: Color) -> bool:
    return len(c) == 3 and all(0 <= v <= 255 for v in c)


@dataclass(frozen=True)
class SkyboxSpec:
    horizon_slices: tuple[str, ...]
    face_size_px: int = 512
    band_height_frac: float = 0.35
    sky_top: Color = DEFAULT_SKY_TOP
    sky_horizon: Color = DEFAULT_SKY_HORIZON
    ground_color: Color = DEFAULT_GROUND
    rhythm_seed: int = 42
    scale_jitter: Vec2 = (0.8, 1.25)

    def __post_init__(self):
        n = self.face_size_px
        _require(n >= 4 and (n & (n - 1)) == 0, "face_size_px", "must be a power of two >= 4")
        _require(_finite(self.band_height_frac) and 0.0 <= self.band_height_frac < 1.0,
                 "band_height_frac", "must be in [0, 1)")
        for name in ("sky_top", "sky_horizon", "ground_color"):
            _require(_valid_color(getattr(self, name)), name, "must be [r, g, b] in 0..255")
        lo, hi = self.scale_jitter
        _require(_finite(lo, hi) and 0 < lo <= hi, "scale_jitter", "must satisfy 0 < min <= max")


@dataclass(frozen=True)
class PanoramaSpec:
    """A captured equirectangular panorama used as the sky of a Panorama scene."""

    image: str
    face_size_px: int = 512

    def __post_init__(self):
        n = self.face_size_px
        _require(n >= 4 and (n & (n - 1)) == 0, "face_size_px", "must be a power of two >= 4")


@dataclass(frozen=True)
class SceneManifest:
    schema_version: int
    scene_id: str
    scene_kind: SceneKind
    sources: tuple[MuralSource, ...] = ()
    slices: tuple[SliceSpec, ...] = ()
    architectures: tuple[ArchitectureSpec, ...] = ()
    skybox: Optional[SkyboxSpec] = None
    panorama: Optional[PanoramaSpec] = None
    narrative: Optional[NarrativeGraph] = None
    feather_px: int = 1
    # manifest path -> (line, column); filled by the parser, ignored by ==
    locations: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        _require(bool(self.scene_id.strip()), "scene_id", "must be nonempty")
        _require(self.schema_version == SCHEMA_VERSION, "schema_version",
                 f"unsupported schema version (expected {SCHEMA_VERSION})")
        _require(self.feather_px >= 0, "feather_px", "must be >= 0")

    def source(self, source_id: str) -> MuralSource | None:
        return next((s for s in self.sources if s.source_id == source_id), None)

    def slice(self, slice_id: str) -> SliceSpec | None:
        return next((s for s in self.slices if s.slice_id == slice_id), None)

    def placed_slices(self) -> list[SliceSpec]:
        """Slices that become scene entities (face-to-eye and cross transfers)."""
        return [s for s in self.slices if isinstance(s.transfer, (FaceToEye, Cross))]

    def entity_ids(self) -> set[str]:
        return {s.slice_id for s in self.placed_slices()} | {a.arch_id for a in self.architectures}


register_variants(TransferKind, DynamicEffect)
