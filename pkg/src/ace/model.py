"""End-to-end training and per-pixel log-probability (anomaly) imaging.

A trained model holds one LUT and one clique histogram per layer. The total
log-probability estimate of an image is the 2**-(L+1) weighted sum of every
layer's clique factors. anomaly_image distributes exactly that quantity over
the pixel grid by a backward cascade: each clique deposits a quarter of its
factor on its two pixels, and each deeper layer's accumulated image is pushed
down to the layer below, each parent pixel splitting its value equally
between the two pixels that formed it. The split halves compound into the
2**-(L+1) weights, so the cascade image sums to the direct total exactly
(up to float rounding).

Evaluation layers are independent once the forward pass is done; the
ACE_THREADS environment variable caps how many worker threads compute
per-layer factor images in parallel. Results are assembled in layer order,
so the output does not depend on the thread count.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from time import perf_counter

import numpy as np

from ace.errors import ContractError
from ace.histogram import CliqueHistogram, accumulate
from ace.image import QuantizedImage, requantize, wedge_correct
from ace.network import LayerSchedule, apply_layer, make_schedule, pair_values
from ace.topomap import TrainConfig, compile_lut, train_modified
from ace._rng import SplitMix64


@dataclass(frozen=True)
class AceModel:
    """Trained multilayer model: schedule, per-layer LUTs and histograms."""

    schedule: LayerSchedule
    luts: tuple
    histograms: tuple
    bits: int
    drop_bits: int
    wedge_applied: bool
    seed: int

    def __post_init__(self):
        n = self.schedule.n_layers
        if len(self.luts) != n or len(self.histograms) != n:
            raise ValueError("need one LUT and one histogram per layer")
        for lut in self.luts:
            if lut.input_bits != self.bits:
                raise ValueError("every LUT must consume model-bits inputs")
        for layer, hist in enumerate(self.histograms):
            if hist.is_input_layer != (layer == 0):
                raise ValueError("exactly layer 0 must be the input-layer histogram")

    @property
    def n_layers(self) -> int:
        return self.schedule.n_layers


class LogProbImage:
    """Spatially registered per-pixel contributions (nats) to the log
    probability total."""

    __slots__ = ("values",)

    def __init__(self, values):
        arr = np.array(values, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise ValueError("values must be 2-D")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("LogProbImage is immutable")

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


def full_mask(n_layers: int) -> frozenset:
    return frozenset(range(n_layers))


def _check_mask(mask, n_layers: int) -> frozenset:
    if mask is None:
        return full_mask(n_layers)
    mask = frozenset(int(layer) for layer in mask)
    if not mask <= full_mask(n_layers):
        raise ContractError(f"mask {sorted(mask)} not a subset of layers 0..{n_layers - 1}")
    return mask


def thread_cap() -> int:
    """Worker-thread cap for per-layer evaluation, from ACE_THREADS (default 1)."""
    raw = os.environ.get("ACE_THREADS")
    if raw is None:
        return 1
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"ACE_THREADS must be an integer, got {raw!r}") from None
    return max(1, cap)


def _prepare(model: AceModel, image: QuantizedImage) -> QuantizedImage:
    """Apply the model's training-time preprocessing to an input image."""
    if image.bits < model.bits:
        raise ContractError(
            f"image has {image.bits} bits, model needs at least {model.bits}"
        )
    out = wedge_correct(image) if model.wedge_applied else image
    return requantize(out, model.bits)


def _check_size(schedule: LayerSchedule, image: QuantizedImage):
    ew, ns = schedule.receptive_fields[-1]
    if image.width < ew or image.height < ns:
        raise ContractError(
            f"image {image.width}x{image.height} smaller than the final "
            f"receptive field {ew}x{ns}"
        )


def _forward(model: AceModel, q: QuantizedImage):
    """Layer images 0..n-1 of the preprocessed input."""
    imgs = [q]
    for layer, step in enumerate(model.schedule.steps[:-1]):
        imgs.append(apply_layer(imgs[layer], model.luts[layer], step))
    return imgs


def _factor_images(model: AceModel, imgs, mask, alpha: float):
    """Per-layer clique factor image for every masked layer."""

    def one(layer: int) -> np.ndarray:
        v1, v2 = pair_values(imgs[layer], model.schedule.steps[layer])
        table = model.histograms[layer].log_factor_table(alpha)
        return table[v1 >> model.drop_bits, v2 >> model.drop_bits]

    layers = sorted(mask)
    cap = thread_cap()
    if cap > 1 and len(layers) > 1:
        with ThreadPoolExecutor(max_workers=min(cap, len(layers))) as pool:
            results = list(pool.map(one, layers))
        return dict(zip(layers, results))
    return {layer: one(layer) for layer in layers}


def train(image: QuantizedImage, n_layers: int, bits: int, drop_bits: int,
          seed: int, wedge: bool = True, on_layer=None) -> AceModel:
    """Train LUTs layer by layer, then fill every layer's clique histogram.

    on_layer(layer_index, seconds), when given, is called after each layer's
    LUT is trained. Deterministic for fixed arguments.
    """
    if not 1 <= bits <= 8:
        raise ValueError("bits must be in [1, 8]")
    if not 0 <= drop_bits < bits:
        raise ValueError("drop_bits must be in [0, bits)")
    schedule = make_schedule(n_layers)
    q = wedge_correct(image) if wedge else image
    q = requantize(q, bits)
    _check_size(schedule, q)
    layer_seeds = SplitMix64(seed)
    imgs = [q]
    luts = []
    for layer, step in enumerate(schedule.steps):
        t0 = perf_counter()
        v1, v2 = pair_values(imgs[layer], step)
        samples = np.stack([v1.ravel(), v2.ravel()], axis=1).astype(np.float64)
        cfg = TrainConfig(final_size=1 << bits, seed=layer_seeds.next_uint64())
        lut = compile_lut(train_modified(samples, cfg), bits)
        luts.append(lut)
        imgs.append(apply_layer(imgs[layer], lut, step))
        if on_layer is not None:
            on_layer(layer, perf_counter() - t0)
    hists = []
    for layer, step in enumerate(schedule.steps):
        v1, v2 = pair_values(imgs[layer], step)
        pairs = np.stack([v1.ravel(), v2.ravel()], axis=1)
        hists.append(accumulate(pairs, bits, drop_bits, layer, layer == 0))
    return AceModel(schedule, tuple(luts), tuple(hists), bits, drop_bits,
                    bool(wedge), int(seed))


def log_q_direct(model: AceModel, image: QuantizedImage, mask=None,
                 alpha: float = 1.0) -> float:
    """Weighted sum of all masked layers' clique factors: the total
    log-probability estimate of the image."""
    mask = _check_mask(mask, model.n_layers)
    q = _prepare(model, image)
    _check_size(model.schedule, q)
    imgs = _forward(model, q)
    factors = _factor_images(model, imgs, mask, alpha)
    total = 0.0
    for layer in sorted(mask):
        total += float(np.sum(factors[layer])) / float(2 ** (layer + 1))
    return total


def anomaly_image(model: AceModel, image: QuantizedImage, mask=None,
                  alpha: float = 1.0) -> LogProbImage:
    """Backward cascade of clique factors into a per-pixel image whose sum
    equals log_q_direct for the same mask."""
    mask = _check_mask(mask, model.n_layers)
    q = _prepare(model, image)
    _check_size(model.schedule, q)
    imgs = _forward(model, q)
    factors = _factor_images(model, imgs, mask, alpha)
    acc = np.zeros((q.height, q.width), dtype=np.float64)
    for layer in range(model.n_layers - 1, -1, -1):
        step = model.schedule.steps[layer]
        # Parent values split in half toward both pixels of each clique;
        # together with the half layer weight that is a quarter per roll.
        acc = 0.25 * (acc + np.roll(acc, step.separation, axis=step.axis))
        if layer in mask:
            f = factors[layer]
            acc += 0.25 * (f + np.roll(f, step.separation, axis=step.axis))
    return LogProbImage(acc)


def render(lp: LogProbImage, invert: bool = True) -> QuantizedImage:
    """Affine map of the value range onto [0, 255] grey levels.

    Rounds half-up. A constant image renders as mid-grey 128. With invert
    (the default) small contributions render white, so anomalous regions
    stand out bright.
    """
    vals = lp.values
    lo = float(vals.min())
    hi = float(vals.max())
    if hi == lo:
        grey = np.full(vals.shape, 128, dtype=np.uint8)
        return QuantizedImage(grey, 8)
    t = (vals - lo) / (hi - lo)
    if invert:
        t = 1.0 - t
    grey = np.floor(255.0 * t + 0.5).astype(np.uint8)
    return QuantizedImage(grey, 8)
