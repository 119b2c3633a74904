import numpy as np
import pytest

from segscore import Canvas, InstanceSet, mask_from_pixels
from segscore.instances import mask_from_offsets


def interval_mask(canvas, start, stop):
    """Mask covering offsets [start, stop) on a single-row canvas."""
    return mask_from_offsets(canvas, range(start, stop))


@pytest.fixture
def two_match_fixture():
    """Two disjoint matched pairs with IoUs exactly 0.6 and 0.8, no fp/fn."""
    canvas = Canvas(100, 1)
    gt = InstanceSet(canvas, (interval_mask(canvas, 0, 40), interval_mask(canvas, 50, 95)))
    pred = InstanceSet(canvas, (interval_mask(canvas, 10, 50), interval_mask(canvas, 55, 100)))
    return pred, gt


@pytest.fixture
def cross_preference_fixture():
    """Pairwise IoU matrix [[0.6, 0.5], [0.55, 0.1]] from real masks.

    p0=[10,50), p1=[6,28), g0=[0,40), g1=[22,66); masks within a set
    overlap, which is permitted.
    """
    canvas = Canvas(66, 1)
    pred = InstanceSet(canvas, (interval_mask(canvas, 10, 50), interval_mask(canvas, 6, 28)))
    gt = InstanceSet(canvas, (interval_mask(canvas, 0, 40), interval_mask(canvas, 22, 66)))
    return pred, gt


def random_instance_set(rng, canvas, n_objects, max_area=12, allow_overlap=True):
    """Small random instance set for oracle comparisons."""
    masks = []
    taken = set()
    for _ in range(n_objects):
        for _attempt in range(200):
            area = rng.integers(1, max_area + 1)
            r = rng.integers(0, canvas.height)
            c = rng.integers(0, canvas.width)
            pixels = {(int(r), int(c))}
            while len(pixels) < area:
                pr, pc = list(pixels)[rng.integers(0, len(pixels))]
                dr, dc = [(0, 1), (0, -1), (1, 0), (-1, 0)][rng.integers(0, 4)]
                nr, nc = pr + dr, pc + dc
                if 0 <= nr < canvas.height and 0 <= nc < canvas.width:
                    pixels.add((nr, nc))
            if allow_overlap or not (pixels & taken):
                taken |= pixels
                masks.append(mask_from_pixels(canvas, pixels))
                break
    return InstanceSet(canvas, tuple(masks))


def upscale_set(instance_set, factor=2):
    """Nearest-neighbor upscaling: every pixel becomes a factor x factor block."""
    canvas = instance_set.canvas
    big = Canvas(canvas.width * factor, canvas.height * factor)
    masks = []
    for mask in instance_set.instances:
        pixels = []
        for off in mask.offsets():
            r, c = divmod(off, canvas.width)
            for dr in range(factor):
                for dc in range(factor):
                    pixels.append((r * factor + dr, c * factor + dc))
        masks.append(mask_from_pixels(big, pixels))
    return InstanceSet(big, tuple(masks), instance_set.labels)
