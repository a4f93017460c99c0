"""Shared fixtures and channel builders for the test suite."""

import math

import pytest

from fsoqkd.channel import (
    ChannelConfig,
    HardSquare,
    SoftGaussian,
    derive,
    matched_square_side,
)

WAVELENGTH = 1.55e-6
RADIUS = 0.10


def gauss_channel(path_length: float, cn2: float = 0.0):
    return derive(
        ChannelConfig(
            wavelength=WAVELENGTH,
            path_length=path_length,
            cn2=cn2,
            pupil=SoftGaussian(radius=RADIUS),
        )
    )


def square_channel(path_length: float, cn2: float = 0.0, side: float = None):
    if side is None:
        side = matched_square_side(RADIUS)
    return derive(
        ChannelConfig(
            wavelength=WAVELENGTH,
            path_length=path_length,
            cn2=cn2,
            pupil=HardSquare(side=side),
        )
    )


def gauss_channel_for_df(df: float):
    """Gaussian-pupil channel whose Fresnel product equals ``df`` exactly."""
    area = math.pi * RADIUS * RADIUS / 2.0
    path_length = area / (WAVELENGTH * math.sqrt(df))
    ch = gauss_channel(path_length)
    assert abs(ch.fresnel_product - df) < 1e-9 * df
    return ch


@pytest.fixture(scope="session")
def ch_gauss_10km():
    return gauss_channel(10e3)


@pytest.fixture(scope="session")
def ch_square_10km():
    return square_channel(10e3)
