"""Kernel backends against independent oracles and each other."""

import random

import pytest

from skimwatch import kernels
from skimwatch.kernels import _pure

from oracles import crc16_bitwise, flood_fill_blobs

BACKENDS = [("pure", _pure)]
if kernels.BACKEND == "native":
    BACKENDS.append(("native", kernels._impl))


@pytest.fixture(params=BACKENDS, ids=[name for name, _ in BACKENDS])
def backend(request):
    return request.param[1]


def test_crc_check_value(backend):
    # Standard CRC-16/CCITT-FALSE check value.
    assert backend.crc16(b"123456789") == 0x29B1
    assert crc16_bitwise(b"123456789") == 0x29B1


def test_crc_matches_bitwise_reference(backend):
    rng = random.Random(1)
    for _ in range(200):
        data = rng.randbytes(rng.randrange(0, 64))
        assert backend.crc16(data) == crc16_bitwise(data)


def test_crc_continuation(backend):
    data = bytes(range(250))
    mid = backend.crc16(data[:100])
    assert backend.crc16(data[100:], mid) == backend.crc16(data)


def _random_scene(rng, width, height, rects):
    background = bytes(rng.randrange(0, 30) for _ in range(width * height))
    frame = bytearray(background)
    for _ in range(rects):
        w = rng.randrange(2, 6)
        h = rng.randrange(2, 6)
        x0 = rng.randrange(0, width - w)
        y0 = rng.randrange(0, height - h)
        for y in range(y0, y0 + h):
            for x in range(x0, x0 + w):
                frame[y * width + x] = 255
    return bytes(frame), background


def test_blobs_match_flood_fill_oracle(backend):
    rng = random.Random(7)
    for _ in range(25):
        frame, background = _random_scene(rng, 48, 36, rects=5)
        got = {(round(cx, 9), round(cy, 9), area)
               for cx, cy, area in backend.diff_blobs(frame, background, 48, 36, 60, 1)}
        want = {(round(cx, 9), round(cy, 9), area)
                for cx, cy, area in flood_fill_blobs(frame, background, 48, 36, 60, 1)}
        assert got == want


def test_blobs_min_area_filter(backend):
    # 1px speck and a 2x2 block; min_area 2 keeps only the block.
    width = height = 8
    background = bytes(width * height)
    frame = bytearray(background)
    frame[0] = 255
    for y, x in ((4, 4), (4, 5), (5, 4), (5, 5)):
        frame[y * width + x] = 255
    blobs = backend.diff_blobs(bytes(frame), background, width, height, 10, 2)
    assert blobs == [(4.5, 4.5, 4)]


@pytest.mark.skipif(kernels.BACKEND != "native", reason="compiled kernel not built")
def test_backends_agree():
    rng = random.Random(99)
    for _ in range(20):
        frame, background = _random_scene(rng, 40, 30, rects=4)
        pure = sorted(_pure.diff_blobs(frame, background, 40, 30, 50, 2))
        native = sorted(kernels._impl.diff_blobs(frame, background, 40, 30, 50, 2))
        assert pure == native
        data = rng.randbytes(rng.randrange(0, 512))
        assert _pure.crc16(data) == kernels._impl.crc16(data)
