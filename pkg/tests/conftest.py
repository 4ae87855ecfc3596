import numpy as np
import pytest

from neighperc.lattice import Window
from neighperc.models import Configuration


def make_config(spec, radius, masks, center=(0, 0)):
    """Configuration from a {vertex: mask} dict; unlisted vertices get mask 0."""
    win = Window(center, radius)
    out = np.zeros(len(win), dtype=np.uint8)
    for v, m in masks.items():
        out[win.rank(v)] = m
    return Configuration(spec, win, 0, 0, out)


@pytest.fixture
def config_factory():
    return make_config
