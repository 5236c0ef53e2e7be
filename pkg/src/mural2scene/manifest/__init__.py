"""Scene manifest: data model, YAML front end, validation and serializer."""

from .model import *  # noqa: F401,F403
from .parse import parse_manifest
from .serialize import serialize_manifest
from .validate import locate, source_size_issues, validate_manifest
