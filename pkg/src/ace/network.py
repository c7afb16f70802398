"""Layer pairing schedule, LUT application over full images, and clique
enumeration.

Pairing alternates north/south and east/west starting north/south, and the
pair separation doubles after every two steps (1, 1, 2, 2, 4, 4, ...), so
the receptive field of a pixel grows through 1x2, 2x2, 2x4, 4x4, 4x8, 8x8,
... in (east/west, north/south) coordinates. Partners wrap around the image
torus, which keeps the transforms exactly translation equivariant and gives
one clique per pixel in every layer.
"""

import enum
from dataclasses import dataclass

import numpy as np

from ace.errors import ContractError
from ace.image import QuantizedImage
from ace.topomap import Lut


class Orientation(enum.Enum):
    NORTH_SOUTH = "north-south"
    EAST_WEST = "east-west"


@dataclass(frozen=True)
class LayerStep:
    """Pairing geometry of one layer-to-layer transform."""

    orientation: Orientation
    separation: int
    layer_index: int

    def __post_init__(self):
        s = self.separation
        if s < 1 or (s & (s - 1)) != 0:
            raise ValueError(f"separation must be a positive power of two, got {s}")
        if self.layer_index < 0:
            raise ValueError("layer_index must be >= 0")

    @property
    def axis(self) -> int:
        """numpy axis the pairing acts along: 0 for north/south rows, 1 for
        east/west columns."""
        return 0 if self.orientation is Orientation.NORTH_SOUTH else 1


@dataclass(frozen=True)
class LayerSchedule:
    """Ordered steps plus the receptive field (east/west, north/south)
    of a pixel after each step."""

    steps: tuple
    receptive_fields: tuple

    @property
    def n_layers(self) -> int:
        return len(self.steps)


def _fields_for(steps) -> tuple:
    ew, ns = 1, 1
    fields = []
    for step in steps:
        if step.orientation is Orientation.NORTH_SOUTH:
            ns += step.separation
        else:
            ew += step.separation
        fields.append((ew, ns))
    return tuple(fields)


def schedule_from_steps(steps) -> LayerSchedule:
    """Build a schedule, enforcing the alternation and doubling invariants."""
    steps = tuple(steps)
    if not steps:
        raise ValueError("schedule needs at least one step")
    for i, step in enumerate(steps):
        want_orient = Orientation.NORTH_SOUTH if i % 2 == 0 else Orientation.EAST_WEST
        if step.orientation is not want_orient:
            raise ValueError(f"step {i}: orientation must alternate starting north-south")
        if step.separation != 1 << (i // 2):
            raise ValueError(f"step {i}: separation must be {1 << (i // 2)}")
        if step.layer_index != i:
            raise ValueError(f"step {i}: layer_index mismatch")
    return LayerSchedule(steps, _fields_for(steps))


def make_schedule(n_layers: int) -> LayerSchedule:
    if not 1 <= n_layers <= 12:
        raise ValueError(f"n_layers must be in [1, 12], got {n_layers}")
    steps = [
        LayerStep(
            Orientation.NORTH_SOUTH if i % 2 == 0 else Orientation.EAST_WEST,
            1 << (i // 2),
            i,
        )
        for i in range(n_layers)
    ]
    return schedule_from_steps(steps)


def _check_step_fits(image: QuantizedImage, step: LayerStep):
    dim = image.height if step.axis == 0 else image.width
    if dim < 2 * step.separation:
        raise ContractError(
            f"image {step.orientation.value} extent {dim} is below "
            f"2 x separation {step.separation}"
        )


def pair_values(image: QuantizedImage, step: LayerStep):
    """(v1, v2) arrays for the clique at every pixel: v1 is the pixel itself,
    v2 its partner at the step's separation, wrapping around the torus."""
    _check_step_fits(image, step)
    v1 = image.data
    v2 = np.roll(image.data, -step.separation, axis=step.axis)
    return v1, v2


def apply_layer(src: QuantizedImage, lut: Lut, step: LayerStep) -> QuantizedImage:
    """Transform a layer: out(p) = table[src(p), src(partner(p))]."""
    if src.bits != lut.input_bits:
        raise ContractError(
            f"image has {src.bits} bits but LUT expects {lut.input_bits}"
        )
    v1, v2 = pair_values(src, step)
    out = lut.table2d[v1, v2].astype(np.uint8)
    return QuantizedImage(out, lut.output_bits)


def clique_pairs(image: QuantizedImage, step: LayerStep):
    """All cliques of a layer as ((row, col), v1, v2) tuples, row-major."""
    v1, v2 = pair_values(image, step)
    h, w = v1.shape
    return [
        ((r, c), int(v1[r, c]), int(v2[r, c])) for r in range(h) for c in range(w)
    ]
