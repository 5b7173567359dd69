"""Bindings for the polyrhythm trainer engine."""

import json

from ._core import (
    PolytrainError,
    Ratio,
    TrainingMode,
    anova_oneway,
    desired_angle,
    guidance_force,
    pearson,
    pearson_resampled,
    percent_change,
    position_score,
    posthoc_pairwise,
    relative_velocity,
    total_score,
    training_power,
    unwrap,
    velocity_score,
)
from . import _core


def default_config():
    return json.loads(_core.default_config_json())


def simulate(config=None, label="sim"):
    """Run a simulated session and return its JSONL log text."""
    return _core.simulate_json(json.dumps(config) if config else "", label)


def rescore(log_text):
    return json.loads(_core.rescore_json(log_text))


def summarize(log_text):
    return json.loads(_core.summarize_json(log_text))


def analyze(logs):
    """`logs` maps a name to JSONL log text."""
    return json.loads(_core.analyze_json(list(logs.items())))


__all__ = [
    "PolytrainError",
    "Ratio",
    "TrainingMode",
    "analyze",
    "anova_oneway",
    "default_config",
    "desired_angle",
    "guidance_force",
    "pearson",
    "pearson_resampled",
    "percent_change",
    "position_score",
    "posthoc_pairwise",
    "relative_velocity",
    "rescore",
    "simulate",
    "summarize",
    "total_score",
    "training_power",
    "unwrap",
    "velocity_score",
]
