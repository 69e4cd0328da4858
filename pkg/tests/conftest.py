"""Shared fixtures and Hypothesis profiles for the test suite."""

import pathlib

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from rydberg_ofdm import (
    ChannelModel,
    OfdmConfig,
    OperatingPoint,
    ReadoutMode,
    StaticGain,
    load_image,
)

settings.register_profile(
    "repo",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

REPO_ROOT = pathlib.Path(__file__).resolve().parents[1]


@pytest.fixture(scope="session")
def repo_root():
    return REPO_ROOT


@pytest.fixture(scope="session")
def data_dir():
    return REPO_ROOT / "data"


@pytest.fixture(scope="session")
def portrait(data_dir):
    return load_image(data_dir / "portrait.pgm")


@pytest.fixture
def default_config():
    return OfdmConfig()


@pytest.fixture
def identity_model():
    """Channel that passes nonnegative samples through unchanged."""
    return ChannelModel(
        readout=OperatingPoint(
            probe_rabi=2 * np.pi * 0.5e6,
            coupling_rabi=2 * np.pi * 3e6,
            readout_mode=ReadoutMode.IDEAL_ENVELOPE,
        ),
        noise_density=0.0,
        gain_process=StaticGain(1.0),
        seed=0,
    )
