"""Narrative graph: model, validation, runtime file, simulation and its oracle."""

from .enumerate import accepting_set, completion_sequences, enumerate_completions
from .model import *  # noqa: F401,F403
from .runtime import compile_narrative, load_narrative
from .script import parse_script, serialize_script
from .simulate import Completed, RejectedEvent, SimTrace, Stuck, TraceStep, simulate
from .validate import validate_graph
