"""Instance data model and file formats (RLE JSON, binary PGM label maps).

Masks are stored as row-major run-length encodings with absolute pixel
offsets into the canvas. Runs never cross a row boundary, which keeps the
geometry predictable for erosion/translation code and makes files
diff-friendly. Masks within one set may overlap.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

__all__ = [
    "Canvas",
    "Mask",
    "InstanceSet",
    "ParseError",
    "parse_rle_json",
    "write_rle_json",
    "parse_label_map_pgm",
    "mask_from_pixels",
    "mask_from_offsets",
]


class ParseError(ValueError):
    """Raised for malformed or invalid instance files."""


@dataclass(frozen=True)
class Canvas:
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"canvas dimensions must be >= 1, got {self.width}x{self.height}")

    @property
    def size(self) -> int:
        return self.width * self.height


@dataclass(frozen=True)
class Mask:
    """A set of pixels as sorted, non-overlapping (start, length) runs.

    Offsets are row-major and zero-based. Validity against a particular
    canvas (bounds, no row crossing) is checked by the constructors below;
    the dataclass itself only guarantees canonical run structure.
    """

    runs: tuple[tuple[int, int], ...]
    area: int = field(init=False)

    def __post_init__(self):
        if not self.runs:
            raise ValueError("empty masks are not representable as instances")
        prev_end = -1
        total = 0
        for start, length in self.runs:
            if length < 1:
                raise ValueError(f"run length must be >= 1, got {length}")
            if start <= prev_end:
                raise ValueError("runs must be sorted, strictly increasing and non-overlapping")
            prev_end = start + length - 1
            total += length
        object.__setattr__(self, "area", total)

    def offsets(self):
        """Yield every covered pixel offset in ascending order."""
        for start, length in self.runs:
            yield from range(start, start + length)

    def offset_set(self) -> set[int]:
        return set(self.offsets())


def _check_mask_in_canvas(mask: Mask, canvas: Canvas, *, what: str = "mask") -> None:
    w = canvas.width
    for start, length in mask.runs:
        end = start + length - 1
        if start < 0 or end >= canvas.size:
            raise ValueError(f"{what}: run ({start},{length}) outside canvas")
        if start // w != end // w:
            raise ValueError(f"{what}: run ({start},{length}) crosses a row boundary")


@dataclass(frozen=True)
class InstanceSet:
    """A canvas plus an ordered list of instance masks.

    Instance order is stable and is the index space used by all downstream
    matrices. Overlap between masks is permitted.
    """

    canvas: Canvas
    instances: tuple[Mask, ...]
    labels: tuple[int, ...] | None = None

    def __post_init__(self):
        for k, mask in enumerate(self.instances):
            _check_mask_in_canvas(mask, self.canvas, what=f"instance {k}")
        if self.labels is not None and len(self.labels) != len(self.instances):
            raise ValueError("labels must align with instances")

    def __len__(self) -> int:
        return len(self.instances)


def mask_from_offsets(canvas: Canvas, offsets) -> Mask:
    """Build a canonical mask from an iterable of absolute pixel offsets."""
    offs = sorted(set(offsets))
    if not offs:
        raise ValueError("cannot build a mask from an empty pixel set")
    if offs[0] < 0 or offs[-1] >= canvas.size:
        raise ValueError("pixel offset outside canvas")
    w = canvas.width
    runs = []
    run_start = offs[0]
    prev = offs[0]
    for o in offs[1:]:
        # consecutive offsets merge only within the same row
        if o == prev + 1 and o % w != 0:
            prev = o
            continue
        runs.append((run_start, prev - run_start + 1))
        run_start = prev = o
    runs.append((run_start, prev - run_start + 1))
    return Mask(tuple(runs))


def mask_from_pixels(canvas: Canvas, pixels) -> Mask:
    """Build a canonical mask from (row, col) pairs; order-insensitive."""
    pixels = set(pixels)
    if not pixels:
        raise ValueError("cannot build a mask from an empty pixel set")
    for r, c in pixels:
        if not (0 <= r < canvas.height and 0 <= c < canvas.width):
            raise ValueError(f"pixel ({r},{c}) outside canvas")
    return mask_from_offsets(canvas, (r * canvas.width + c for r, c in pixels))


def parse_rle_json(data: bytes) -> InstanceSet:
    """Parse the RLE JSON instance format.

    Schema: {"width": int, "height": int,
             "instances": [{"id": int>=1, "rle": [[start, length], ...]}, ...]}
    """
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top-level value must be an object")
    try:
        width = doc["width"]
        height = doc["height"]
        entries = doc["instances"]
    except KeyError as exc:
        raise ParseError(f"missing key {exc}") from exc
    if not isinstance(width, int) or not isinstance(height, int) or width < 1 or height < 1:
        raise ParseError(f"invalid canvas dimensions {width}x{height}")
    canvas = Canvas(width, height)
    if not isinstance(entries, list):
        raise ParseError('"instances" must be an array')

    masks = []
    labels = []
    for k, entry in enumerate(entries):
        if not isinstance(entry, dict) or "id" not in entry or "rle" not in entry:
            raise ParseError(f"instance {k}: expected object with 'id' and 'rle'")
        label = entry["id"]
        if not isinstance(label, int) or label < 1:
            raise ParseError(f"instance {k}: id must be a positive integer")
        rle = entry["rle"]
        if not isinstance(rle, list):
            raise ParseError(f"instance {k}: rle must be an array")
        if not rle:
            raise ParseError(f"instance {k}: zero-area instance")
        prev_end = -1
        offsets = []
        for item in rle:
            if (
                not isinstance(item, list)
                or len(item) != 2
                or not all(isinstance(v, int) for v in item)
            ):
                raise ParseError(f"instance {k}: runs must be [start, length] integer pairs")
            start, length = item
            if length < 1:
                raise ParseError(f"instance {k}: run length must be >= 1, got {length}")
            if start <= prev_end:
                raise ParseError(f"instance {k}: runs must be sorted and non-overlapping")
            if start < 0 or start + length > canvas.size:
                raise ParseError(f"instance {k}: run ({start},{length}) outside canvas")
            prev_end = start + length - 1
            offsets.extend(range(start, start + length))
        # input runs may cross row boundaries; canonicalization splits them
        masks.append(mask_from_offsets(canvas, offsets))
        labels.append(label)
    return InstanceSet(canvas, tuple(masks), tuple(labels))


def write_rle_json(instance_set: InstanceSet) -> bytes:
    """Emit canonical RLE JSON: fixed key order, compact separators.

    parse_rle_json(write_rle_json(s)) reproduces s exactly, and the output
    is a fixpoint of one write-parse-write cycle.
    """
    labels = instance_set.labels or tuple(range(1, len(instance_set) + 1))
    doc = {
        "width": instance_set.canvas.width,
        "height": instance_set.canvas.height,
        "instances": [
            {"id": label, "rle": [[s, l] for s, l in mask.runs]}
            for label, mask in zip(labels, instance_set.instances)
        ],
    }
    return json.dumps(doc, separators=(",", ":")).encode("utf-8")


def _pgm_tokens(data: bytes):
    """Yield whitespace-separated header tokens, honoring '#' comments."""
    i = 0
    n = len(data)
    while i < n:
        c = data[i : i + 1]
        if c.isspace():
            i += 1
        elif c == b"#":
            while i < n and data[i : i + 1] != b"\n":
                i += 1
        else:
            j = i
            while j < n and not data[j : j + 1].isspace():
                j += 1
            yield data[i:j], j
            i = j


def parse_label_map_pgm(data: bytes) -> InstanceSet:
    """Parse a binary PGM label map: 0 = background, each positive value
    is one instance. Instances are ordered by ascending label value."""
    tokens = _pgm_tokens(data)
    try:
        magic, _ = next(tokens)
    except StopIteration:
        raise ParseError("empty PGM file") from None
    if magic != b"P5":
        raise ParseError(f"not a binary PGM (magic {magic!r}, expected b'P5')")
    header = []
    end = 0
    for tok, pos in tokens:
        header.append(tok)
        end = pos
        if len(header) == 3:
            break
    if len(header) < 3:
        raise ParseError("truncated PGM header")
    try:
        width, height, maxval = (int(t) for t in header)
    except ValueError as exc:
        raise ParseError(f"non-numeric PGM header: {exc}") from exc
    if width < 1 or height < 1:
        raise ParseError(f"invalid canvas dimensions {width}x{height}")
    if maxval < 1:
        raise ParseError("PGM maxval must be >= 1")
    if maxval > 65535:
        raise ParseError(f"PGM maxval {maxval} exceeds 65535")
    payload = data[end + 1 :]  # single whitespace byte after maxval
    sample_size = 1 if maxval < 256 else 2
    need = width * height * sample_size
    if len(payload) < need:
        raise ParseError(f"truncated pixel payload: need {need} bytes, have {len(payload)}")

    canvas = Canvas(width, height)
    by_label: dict[int, list[int]] = {}
    if sample_size == 1:
        values = payload[:need]
    else:
        values = [
            (payload[2 * k] << 8) | payload[2 * k + 1] for k in range(width * height)
        ]
    for offset, value in enumerate(values):
        if value:
            by_label.setdefault(value, []).append(offset)

    labels = sorted(by_label)
    masks = tuple(mask_from_offsets(canvas, by_label[label]) for label in labels)
    return InstanceSet(canvas, masks, tuple(labels))
