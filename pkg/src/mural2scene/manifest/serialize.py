from __future__ import annotations

import yaml

from ..codec import encode
from .model import SceneManifest

HEADER = "# mural2scene scene manifest (YAML); see docs/manifest.md\n"


class _Dumper(yaml.SafeDumper):
    # never emit anchors, the parser rejects them
    def ignore_aliases(self, data):
        return True


def serialize_manifest(m: SceneManifest) -> str:
    """Canonical text for ``m``; ``parse_manifest`` of the result equals ``m``."""
    body = yaml.dump(
        encode(m),
        Dumper=_Dumper,
        sort_keys=False,
        default_flow_style=None,
        allow_unicode=True,
        width=96,
    )
    return HEADER + body
