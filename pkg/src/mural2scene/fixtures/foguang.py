"""Foguang Temple test fixture: a synthetic mural crop, its manifest and a walkthrough script.

The real east-wall mural is 13.0 m x 3.6 m scanned at 300 dpi; the fixture
paints a procedural stand-in for a 1.3 m x 0.36 m crop of it at the same
dpi (15354 x 4252 px). Colors, shapes, placements and the ten knowledge
items are placeholders; only the narrative's structure follows the
experiment flow (cave, official, monk, cleaning, documentary, farewell, back
to the cave).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from ..manifest.model import (
    INCH_M,
    ArchitectureRef,
    ArchitectureSpec,
    AxisLock,
    Bob,
    Cross,
    FaceToEye,
    MuralSource,
    RoofSpec,
    SceneKind,
    SceneManifest,
    SkyboxBand,
    SkyboxSpec,
    SliceSpec,
    Storey,
    ViewCalibration,
    SCHEMA_VERSION,
)
from ..manifest.serialize import serialize_manifest
from ..narrative.script import serialize_script
from ..narrative.model import (
    Clean,
    CleanComplete,
    Dialogue,
    DialogueEnd,
    Edge,
    GazeDwell,
    GuidanceConfig,
    Grab,
    KnowledgeItem,
    KnowledgeSource,
    Media,
    MediaEnd,
    NarrativeGraph,
    NarrativeNode,
    RayClick,
    Task,
    Teleport,
)
from ..values import Placement

CROP_W_M = 1.3
CROP_H_M = 0.36
DPI = 300
IMAGE_NAME = "east_wall_crop.png"
MANIFEST_NAME = "foguang.scene"
SCRIPT_NAME = "canonical_script.yaml"

# mask outlines as fractions of the crop (u right, v down)
OUTLINES: dict[str, list[tuple[float, float]]] = {
    "hall_wall": [(0.06, 0.46), (0.40, 0.46), (0.40, 0.86), (0.06, 0.86)],
    "hall_roof": [(0.03, 0.44), (0.43, 0.44), (0.37, 0.28), (0.09, 0.28)],
    "official": [(0.475, 0.90), (0.485, 0.55), (0.500, 0.40), (0.515, 0.36), (0.530, 0.40),
                 (0.545, 0.55), (0.555, 0.90)],
    "monk": [(0.595, 0.90), (0.600, 0.58), (0.615, 0.44), (0.630, 0.40), (0.645, 0.44),
             (0.660, 0.58), (0.665, 0.90)],
    "broom": [(0.700, 0.88), (0.704, 0.62), (0.698, 0.55), (0.712, 0.55), (0.708, 0.62),
              (0.716, 0.88)],
    "aperture": [(0.745, 0.62), (0.775, 0.58), (0.805, 0.62), (0.805, 0.78), (0.745, 0.78)],
    "mountain_1": [(0.44, 0.33), (0.49, 0.12), (0.52, 0.20), (0.55, 0.08), (0.60, 0.33)],
    "mountain_2": [(0.62, 0.33), (0.68, 0.06), (0.73, 0.18), (0.76, 0.12), (0.80, 0.33)],
    "mountain_3": [(0.82, 0.33), (0.86, 0.14), (0.90, 0.10), (0.94, 0.20), (0.98, 0.33)],
    "cloud": [(0.83, 0.035), (0.87, 0.015), (0.92, 0.02), (0.955, 0.045), (0.91, 0.07),
              (0.86, 0.065)],
    "rock": [(0.85, 0.95), (0.86, 0.82), (0.89, 0.76), (0.93, 0.79), (0.95, 0.95)],
}

# East Hall: seven bays by four (about 34 m x 17.7 m), one storey under a hipped roof
HALL = dict(width_m=34.0, depth_m=17.7, height_m=9.0, overhang_m=3.0, rise_m=8.0)
# authored viewpoint; image_rect is the bounding box of the hall's projected hull
# from this eye, computed once and written down to four places
HALL_EYE = (0.0, 9.0, 80.0)
HALL_LOOK_AT = (0.0, 9.0, 0.0)
HALL_FOV = 0.5
HALL_RECT = (-1.1493, -0.4954, 1.1493, 0.4403)


def pixel_size(dpi: int = DPI) -> tuple[int, int]:
    return round(CROP_W_M / INCH_M * dpi), round(CROP_H_M / INCH_M * dpi)


def _mask(name: str, dpi: int) -> tuple[tuple[float, float], ...]:
    w, h = pixel_size(dpi)
    return tuple((round(u * w, 2), round(v * h, 2)) for u, v in OUTLINES[name])


def foguang_graph() -> NarrativeGraph:
    items = [KnowledgeItem(f"k{i:02d}", f"placeholder knowledge item {i}",
                           KnowledgeSource.MEDIA_NODE if i in (7, 8) else KnowledgeSource.DIALOGUE_LINE)
             for i in range(1, 11)]
    nodes = (
        NarrativeNode("cave", Teleport("foguang_temple", Placement((0.0, 0.0, 0.0)))),
        NarrativeNode("talk_official", Dialogue("official", (
            "Welcome to the temple.", "This hall was built in the Tang dynasty.",
            "Speak with the monk next.")), frozenset({"k01", "k02", "k03"})),
        NarrativeNode("talk_monk", Dialogue("monk", (
            "The murals here are very old.", "Dust settles on them every season.",
            "Please help me clean the hall.")), frozenset({"k04", "k05", "k06"})),
        NarrativeNode("clean_hall", Task(3, ("broom",))),
        NarrativeNode("documentary", Media(180.0), frozenset({"k07", "k08"})),
        NarrativeNode("farewell_monk", Dialogue("monk", (
            "Thank you for your help.", "The cave awaits your return."), auto_start=True),
            frozenset({"k09", "k10"})),
        NarrativeNode("return_to_cave", Teleport("mogao_cave_61", Placement((0.0, 0.0, 2.0), 3.141592653589793))),
    )
    edges = (
        Edge("cave", "talk_official", GazeDwell("aperture", 2.0)),
        Edge("talk_official", "talk_monk", RayClick("monk")),
        Edge("talk_monk", "clean_hall", DialogueEnd("talk_monk")),
        Edge("clean_hall", "documentary", CleanComplete("clean_hall")),
        Edge("documentary", "farewell_monk", MediaEnd("documentary")),
        Edge("farewell_monk", "return_to_cave", DialogueEnd("farewell_monk")),
    )
    guidance = GuidanceConfig(waypoint_paths={
        "cave": ((0.0, 0.1, 0.0), (0.0, 0.1, -3.0), (0.0, 1.5, -5.0)),
        "talk_official": ((0.0, 0.1, -5.0), (-3.0, 0.1, -10.5)),
        "talk_monk": ((-3.0, 0.1, -10.5), (2.0, 0.1, -10.5)),
        "clean_hall": ((2.0, 0.1, -10.5), (4.0, 0.1, -9.0), (0.0, 0.1, -22.0)),
        "farewell_monk": ((0.0, 0.1, -22.0), (2.0, 0.1, -12.0)),
    })
    return NarrativeGraph(nodes, "cave", frozenset({"return_to_cave"}), edges, tuple(items), guidance)


def canonical_script() -> list:
    """Gaze at the aperture, talk to both NPCs, grab the broom, wipe 3 spots, watch, say goodbye."""
    return [
        GazeDwell("aperture", 2.0),
        RayClick("official"),
        DialogueEnd("talk_official"),
        RayClick("monk"),
        DialogueEnd("talk_monk"),
        Grab("broom"),
        Clean("clean_hall"),
        Clean("clean_hall"),
        Clean("clean_hall"),
        MediaEnd("documentary"),
        DialogueEnd("farewell_monk"),
    ]


def foguang_manifest(dpi: int = DPI) -> SceneManifest:
    src = MuralSource("east_wall", IMAGE_NAME, CROP_W_M, CROP_H_M, dpi)

    def sl(name, transfer, placement=None, effects=(), tags=()):
        return SliceSpec(name, "east_wall", _mask(name, dpi), transfer, placement, effects, tags)

    slices = (
        sl("hall_wall", ArchitectureRef("east_hall")),
        sl("hall_roof", ArchitectureRef("east_hall")),
        sl("official", FaceToEye(), Placement((-3.0, 0.0, -12.0), 0.0, 9.0), tags=("npc",)),
        sl("monk", FaceToEye(), Placement((2.0, 0.0, -12.0), 0.0, 9.0), tags=("npc",)),
        sl("broom", FaceToEye(AxisLock.CYLINDRICAL), Placement((4.0, 0.0, -9.0), 0.0, 6.0),
           tags=("prop",)),
        sl("aperture", FaceToEye(), Placement((0.0, 1.0, -5.0), 0.0, 12.0)),
        sl("mountain_1", SkyboxBand()),
        sl("mountain_2", SkyboxBand()),
        sl("mountain_3", SkyboxBand()),
        sl("cloud", FaceToEye(), Placement((12.0, 22.0, -60.0), 0.0, 60.0),
           effects=(Bob(0.5, 6.0),), tags=("cloud",)),
        sl("rock", Cross(), Placement((-8.0, 0.0, -15.0), 0.7853981633974483, 10.0)),
    )
    hall = ArchitectureSpec(
        "east_hall", HALL["width_m"], HALL["depth_m"],
        (Storey(HALL["height_m"], "hall_wall",
                RoofSpec(HALL["overhang_m"], HALL["rise_m"], "hall_roof")),),
        Placement((0.0, 0.0, -40.0)),
        ViewCalibration(HALL_EYE, HALL_LOOK_AT, HALL_FOV, HALL_RECT),
    )
    sky = SkyboxSpec(("mountain_1", "mountain_2", "mountain_3"), 512, 0.35, rhythm_seed=42,
                     scale_jitter=(0.8, 1.25))
    return SceneManifest(SCHEMA_VERSION, "foguang_temple", SceneKind.RECONSTRUCTED, (src,),
                         slices, (hall,), sky, None, foguang_graph(), 1)


# -- procedural mural ------------------------------------------------------------

_PALETTE = {
    "hall_wall": (168, 62, 44), "hall_roof": (58, 74, 86), "official": (176, 40, 36),
    "monk": (196, 146, 62), "broom": (120, 92, 40), "aperture": (40, 32, 28),
    "mountain_1": (62, 120, 96), "mountain_2": (54, 104, 110), "mountain_3": (70, 128, 88),
    "cloud": (236, 232, 218), "rock": (110, 104, 96),
}
_LOW = 8  # paint at 1/8 resolution, then upscale


def paint_mural(dpi: int = DPI, seed: int = 61) -> Image.Image:
    """Deterministic stand-in mural: sky wash, earth ground and flat-painted figures."""
    w, h = pixel_size(dpi)
    lw, lh = max(8, w // _LOW), max(8, h // _LOW)
    rng = np.random.default_rng(seed)
    v = np.linspace(0.0, 1.0, lh)[:, None, None]
    top = np.array([186, 222, 170], np.float64)
    horizon = np.array([238, 170, 96], np.float64)
    ground = np.array([122, 86, 52], np.float64)
    sky = top + (horizon - top) * np.clip(v / 0.36, 0, 1)
    base = np.where(v < 0.36, sky, ground + (horizon - ground) * 0.15 * (1 - v))
    base = np.broadcast_to(base, (lh, lw, 3)) + rng.normal(0.0, 6.0, (lh, lw, 3))
    low = Image.fromarray(np.clip(base, 0, 255).astype(np.uint8))
    draw = ImageDraw.Draw(low)
    for name, outline in OUTLINES.items():
        pts = [(u * lw, vv * lh) for u, vv in outline]
        color = _PALETTE[name]
        draw.polygon(pts, fill=color)
        # a darker inner stroke so clips have some structure
        cx = sum(p[0] for p in pts) / len(pts)
        cy = sum(p[1] for p in pts) / len(pts)
        inner = [(cx + 0.6 * (x - cx), cy + 0.6 * (y - cy)) for x, y in pts]
        draw.polygon(inner, outline=tuple(int(c * 0.6) for c in color))
    # pillars and doors on the hall facade
    x0, y0 = OUTLINES["hall_wall"][0]
    x1, y1 = OUTLINES["hall_wall"][2]
    for k in range(8):
        px = (x0 + (x1 - x0) * k / 7) * lw
        draw.line([(px, y0 * lh), (px, y1 * lh)], fill=(92, 30, 24), width=max(1, lw // 400))
    for k in range(7):
        cx = (x0 + (x1 - x0) * (k + 0.5) / 7) * lw
        draw.rectangle([cx - lw * 0.012, (y0 + 0.18) * lh, cx + lw * 0.012, y1 * lh],
                       fill=(70, 40, 30))
    return low.resize((w, h), Image.Resampling.BILINEAR)


def write_foguang(directory: str | Path, dpi: int = DPI, image: bool = True) -> Path:
    """Write image, manifest and canonical script into ``directory``; returns the manifest path."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    if image:
        paint_mural(dpi).save(d / IMAGE_NAME, format="PNG", compress_level=1)
    (d / MANIFEST_NAME).write_text(serialize_manifest(foguang_manifest(dpi)), encoding="utf-8")
    (d / SCRIPT_NAME).write_text(serialize_script(canonical_script()), encoding="utf-8")
    return d / MANIFEST_NAME
