"""Shared fixtures: meta-graphs are built once per session and reused."""

import random

import pytest

from whmoves import metagraph
from whmoves.cubic import CubicGraph, petersen_graph


def random_cubic(n: int, seed: int) -> CubicGraph:
    """Uniform pairing-model sample conditioned on connectivity."""
    rng = random.Random(seed)
    while True:
        stubs = [v for v in range(n) for _ in range(3)]
        rng.shuffle(stubs)
        it = iter(stubs)
        g = CubicGraph(n, tuple(zip(it, it)))
        if g.is_connected():
            return g


_META_CACHE: dict[tuple[int, str], metagraph.MetaGraph] = {}


def get_meta(n: int, mode: str) -> metagraph.MetaGraph:
    key = (n, mode)
    if key not in _META_CACHE:
        _META_CACHE[key] = metagraph.build(n, mode)
    return _META_CACHE[key]


@pytest.fixture(scope="session")
def meta():
    return get_meta


@pytest.fixture(scope="session")
def g2u():
    return get_meta(2, "unlabelled")


@pytest.fixture(scope="session")
def g4u():
    return get_meta(4, "unlabelled")


@pytest.fixture(scope="session")
def g6u():
    return get_meta(6, "unlabelled")


@pytest.fixture(scope="session")
def g2l():
    return get_meta(2, "labelled")


@pytest.fixture(scope="session")
def g4l():
    return get_meta(4, "labelled")


@pytest.fixture(scope="session")
def g6l():
    return get_meta(6, "labelled")


@pytest.fixture(scope="session")
def petersen():
    return petersen_graph()
