"""Synthetic scenes and degradation sequences.

Three modes mirror the sensitivity/continuity experiments: incremental
false objects, per-object morphological erosion, and uniform pixel
removal. Traces are byte-deterministic for a given seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .instances import Canvas, InstanceSet, Mask, mask_from_offsets
from .report import fmt12, score_scene
from .rng import SplitMix64

__all__ = [
    "Scene",
    "TraceStep",
    "DegradationTrace",
    "PlacementError",
    "gen_scene",
    "erode_mask",
    "run_incremental_falses",
    "run_object_erosion",
    "run_pixel_removal",
    "trace_to_csv",
]

PLACEMENT_BUDGET = 1000  # rejection attempts per insertion
TRACE_COLUMNS = ("ap", "map", "pq", "sbd", "aji", "sorted_ap")


class PlacementError(RuntimeError):
    """Raised when an object cannot be placed within the rejection budget."""


@dataclass(frozen=True)
class Scene:
    gt: InstanceSet
    pred: InstanceSet

    def __post_init__(self):
        if self.gt.canvas != self.pred.canvas:
            raise ValueError("scene sets must share a canvas")


@dataclass(frozen=True)
class TraceStep:
    index: int
    scene: Scene
    scores: dict[str, float]


@dataclass
class DegradationTrace:
    mode: str
    seed: int
    steps: list[TraceStep] = field(default_factory=list)
    stop_reason: str | None = None  # set when the trace ends early

    @property
    def truncated(self) -> bool:
        return self.stop_reason is not None


def _neighbors4(offset: int, canvas: Canvas):
    w = canvas.width
    r, c = divmod(offset, w)
    if c > 0:
        yield offset - 1
    if c < w - 1:
        yield offset + 1
    if r > 0:
        yield offset - w
    if r < canvas.height - 1:
        yield offset + w


def _grow_blob(canvas: Canvas, start: int, target: int, occupied: set[int], rng: SplitMix64):
    """Eden growth: repeatedly absorb a uniformly chosen free frontier cell.

    Returns the pixel set or None if growth stalls before reaching target.
    """
    pixels = {start}
    frontier: list[int] = []
    in_frontier: set[int] = set()
    for nb in _neighbors4(start, canvas):
        if nb not in occupied:
            frontier.append(nb)
            in_frontier.add(nb)
    while len(pixels) < target:
        if not frontier:
            return None
        pos = rng.below(len(frontier))
        cell = frontier[pos]
        frontier[pos] = frontier[-1]
        frontier.pop()
        in_frontier.discard(cell)
        pixels.add(cell)
        for nb in _neighbors4(cell, canvas):
            if nb not in occupied and nb not in pixels and nb not in in_frontier:
                frontier.append(nb)
                in_frontier.add(nb)
    return pixels


def gen_scene(canvas: Canvas, n_objects: int, size_range: tuple[int, int], seed: int) -> InstanceSet:
    """n_objects non-overlapping random blobs, deterministic per seed."""
    lo, hi = size_range
    if lo < 1 or hi < lo:
        raise ValueError(f"invalid size range {size_range}")
    rng = SplitMix64(seed)
    occupied: set[int] = set()
    masks: list[Mask] = []
    for _ in range(n_objects):
        target = rng.randint(lo, hi)
        for attempt in range(PLACEMENT_BUDGET):
            start = rng.below(canvas.size)
            if start in occupied:
                continue
            pixels = _grow_blob(canvas, start, target, occupied, rng)
            if pixels is not None:
                occupied |= pixels
                masks.append(mask_from_offsets(canvas, pixels))
                break
        else:
            raise PlacementError(
                f"placement budget exhausted after {PLACEMENT_BUDGET} attempts "
                f"(object {len(masks)} of {n_objects})"
            )
    return InstanceSet(canvas, tuple(masks))


def _mask_to_array(mask: Mask, canvas: Canvas) -> np.ndarray:
    arr = np.zeros(canvas.size, dtype=bool)
    for start, length in mask.runs:
        arr[start : start + length] = True
    return arr.reshape(canvas.height, canvas.width)


def erode_mask(mask: Mask, canvas: Canvas) -> Mask | None:
    """Morphological erosion with the full 3x3 structuring element.

    A pixel survives iff itself and all 8 neighbors are in the mask;
    outside the canvas counts as background. Returns None when every
    pixel erodes away (emptiness is a signal, not an error).
    """
    arr = _mask_to_array(mask, canvas)
    padded = np.zeros((canvas.height + 2, canvas.width + 2), dtype=bool)
    padded[1:-1, 1:-1] = arr
    eroded = np.ones_like(arr)
    for dr in (0, 1, 2):
        for dc in (0, 1, 2):
            eroded &= padded[dr : dr + canvas.height, dc : dc + canvas.width]
    if not eroded.any():
        return None
    rows, cols = np.nonzero(eroded)
    return mask_from_offsets(canvas, (int(r) * canvas.width + int(c) for r, c in zip(rows, cols)))


def _record(trace: DegradationTrace, index: int, gt: InstanceSet, pred: InstanceSet) -> None:
    scene = Scene(gt=gt, pred=pred)
    trace.steps.append(TraceStep(index=index, scene=scene, scores=score_scene(pred, gt)))


def _translate_mask(mask: Mask, canvas: Canvas, rng: SplitMix64, blocked: set[int]) -> Mask | None:
    """Uniform random translation of the mask so that it fits the canvas and
    hits no blocked pixel; None when the rejection budget runs out."""
    offsets = list(mask.offsets())
    w = canvas.width
    rows = [o // w for o in offsets]
    cols = [o % w for o in offsets]
    r0, r1 = min(rows), max(rows)
    c0, c1 = min(cols), max(cols)
    for _ in range(PLACEMENT_BUDGET):
        new_r = rng.below(canvas.height - (r1 - r0))
        new_c = rng.below(canvas.width - (c1 - c0))
        shift = (new_r - r0) * w + (new_c - c0)
        moved = [o + shift for o in offsets]
        if all(o not in blocked for o in moved):
            return mask_from_offsets(canvas, moved)
    return None


def run_incremental_falses(base: InstanceSet, n_steps: int, seed: int) -> DegradationTrace:
    """Start with gt = pred = base; per step duplicate a random object of
    the receiving set and place it where it overlaps nothing in either set.
    Two insertions go to the prediction set, then two to the ground truth,
    cyclically."""
    if len(base) == 0:
        raise ValueError("base set must be non-empty")
    rng = SplitMix64(seed)
    canvas = base.canvas
    gt_masks = list(base.instances)
    pred_masks = list(base.instances)
    occupied: set[int] = set()
    for m in base.instances:
        occupied |= m.offset_set()

    trace = DegradationTrace(mode="incremental-falses", seed=seed)
    _record(trace, 0, base, base)
    for k in range(1, n_steps + 1):
        to_pred = ((k - 1) // 2) % 2 == 0
        receiving = pred_masks if to_pred else gt_masks
        source = rng.choice(receiving)
        placed = _translate_mask(source, canvas, rng, occupied)
        if placed is None:
            trace.stop_reason = f"placement budget exhausted at step {k}"
            break
        receiving.append(placed)
        occupied |= placed.offset_set()
        _record(trace, k, InstanceSet(canvas, tuple(gt_masks)), InstanceSet(canvas, tuple(pred_masks)))
    return trace


def run_object_erosion(base: InstanceSet, n_steps: int, seed: int) -> DegradationTrace:
    """Ground truth stays fixed; per step one uniformly chosen prediction
    object is eroded. Objects that would vanish are resampled; the trace
    stops early once every object would vanish."""
    if len(base) == 0:
        raise ValueError("base set must be non-empty")
    rng = SplitMix64(seed)
    canvas = base.canvas
    pred_masks = list(base.instances)

    trace = DegradationTrace(mode="object-erosion", seed=seed)
    _record(trace, 0, base, base)
    for k in range(1, n_steps + 1):
        candidates = list(range(len(pred_masks)))
        eroded = None
        while candidates:
            pos = rng.below(len(candidates))
            idx = candidates.pop(pos)
            eroded = erode_mask(pred_masks[idx], canvas)
            if eroded is not None:
                pred_masks[idx] = eroded
                break
        if eroded is None:
            trace.stop_reason = f"every object would vanish at step {k}"
            break
        _record(trace, k, base, InstanceSet(canvas, tuple(pred_masks)))
    return trace


def run_pixel_removal(base: InstanceSet, fraction: float, n_steps: int, seed: int) -> DegradationTrace:
    """Per step remove ceil(fraction * original area) uniformly chosen
    remaining pixels from every prediction object, never going below one
    pixel. Ground truth stays fixed."""
    if not (0.0 < fraction < 1.0):
        raise ValueError(f"fraction must lie in (0,1), got {fraction}")
    if len(base) == 0:
        raise ValueError("base set must be non-empty")
    rng = SplitMix64(seed)
    canvas = base.canvas
    remaining = [sorted(m.offsets()) for m in base.instances]
    quota = [math.ceil(fraction * m.area) for m in base.instances]

    trace = DegradationTrace(mode="pixel-removal", seed=seed)
    _record(trace, 0, base, base)
    for k in range(1, n_steps + 1):
        for i, pixels in enumerate(remaining):
            take = min(quota[i], len(pixels) - 1)
            if take <= 0:
                continue
            doomed = set(rng.sample_indices(len(pixels), take))
            remaining[i] = [v for idx, v in enumerate(pixels) if idx not in doomed]
        pred = InstanceSet(canvas, tuple(mask_from_offsets(canvas, p) for p in remaining))
        _record(trace, k, base, pred)
    return trace


def trace_to_csv(trace: DegradationTrace) -> str:
    lines = ["step," + ",".join(TRACE_COLUMNS)]
    for step in trace.steps:
        lines.append(str(step.index) + "," + ",".join(fmt12(step.scores[c]) for c in TRACE_COLUMNS))
    if trace.stop_reason is not None:
        lines.append(f"# truncated: {trace.stop_reason}")
    return "\n".join(lines) + "\n"
