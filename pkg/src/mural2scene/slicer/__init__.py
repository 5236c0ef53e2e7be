"""Slicer: cut alpha-matted clips out of mural images and pack them into atlases."""

from .atlas import Atlas, UVRect, pack_atlas
from .matte import Clip, edge_distance, extract_clip, feather_alpha, rasterize_mask
from .source import SourceImage, downsample, load_source, write_png
