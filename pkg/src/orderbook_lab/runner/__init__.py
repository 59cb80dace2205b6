"""Experiment configs, figure presets and the command-line front end."""

from .config import ExperimentConfig, Measurement, RunSpec, apply_scale, load_config
from .experiment import RunManifest, measure, merge_replicas, run_experiment
from .presets import PRESETS, list_presets, preset_config

__all__ = ["ExperimentConfig", "Measurement", "RunSpec", "RunManifest", "PRESETS",
           "apply_scale", "load_config", "list_presets", "measure", "merge_replicas",
           "preset_config", "run_experiment"]
