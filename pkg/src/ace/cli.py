"""Command-line workflows and the persisted model format.

Subcommands
    train    fit a model to a PGM texture and write it to disk
    apply    render the anomaly image of a PGM under a stored model
    inspect  print schedule, receptive fields and histogram health

Exit codes: 0 ok, 2 usage or I/O trouble, 3 model/image contract mismatch.
The ACE_THREADS environment variable caps evaluation worker threads.

Model files are binary little-endian, magic "ACE1":

    magic     4 bytes  b"ACE1"
    n_layers  u32
    bits      u16
    drop_bits u16
    wedge     u8  (0 or 1)
    seed      u64
    per layer:
        orientation u8  (0 north-south, 1 east-west)
        separation  u32
        lut_len     u32
        lut entries u16 * lut_len
        side        u32
        counts      u64 * side * side, row-major

Histogram counts are stored raw; smoothing stays a query-time choice.
"""

import argparse
import struct
import sys
from pathlib import Path

import numpy as np

from ace import model as ace_model
from ace.errors import ContractError, PgmParseError
from ace.histogram import CliqueHistogram
from ace.image import load_pgm, save_pgm
from ace.network import LayerStep, Orientation, schedule_from_steps
from ace.topomap import Lut

MODEL_MAGIC = b"ACE1"

_ORIENT_CODE = {Orientation.NORTH_SOUTH: 0, Orientation.EAST_WEST: 1}
_CODE_ORIENT = {v: k for k, v in _ORIENT_CODE.items()}


def save_model(m: ace_model.AceModel) -> bytes:
    out = [MODEL_MAGIC]
    out.append(struct.pack("<IHHBQ", m.n_layers, m.bits, m.drop_bits,
                           1 if m.wedge_applied else 0, m.seed))
    for step, lut, hist in zip(m.schedule.steps, m.luts, m.histograms):
        out.append(struct.pack("<BII", _ORIENT_CODE[step.orientation],
                               step.separation, len(lut.table)))
        out.append(lut.table.astype("<u2").tobytes())
        out.append(struct.pack("<I", hist.side))
        out.append(hist.counts.astype("<u8").tobytes())
    return b"".join(out)


def load_model(buf: bytes) -> ace_model.AceModel:
    def take(n, what):
        nonlocal pos
        if pos + n > len(buf):
            raise ValueError(f"model file truncated reading {what} at byte {pos}")
        piece = buf[pos : pos + n]
        pos += n
        return piece

    pos = 0
    if take(4, "magic") != MODEL_MAGIC:
        raise ValueError("not an ACE1 model file")
    n_layers, bits, drop_bits, wedge, seed = struct.unpack("<IHHBQ", take(17, "header"))
    steps, luts, hists = [], [], []
    for layer in range(n_layers):
        orient_code, separation, lut_len = struct.unpack("<BII", take(9, "layer header"))
        if orient_code not in _CODE_ORIENT:
            raise ValueError(f"bad orientation code {orient_code} in layer {layer}")
        steps.append(LayerStep(_CODE_ORIENT[orient_code], separation, layer))
        table = np.frombuffer(take(2 * lut_len, "LUT"), dtype="<u2")
        luts.append(Lut(bits, bits, table))
        (side,) = struct.unpack("<I", take(4, "histogram side"))
        counts = np.frombuffer(take(8 * side * side, "histogram"), dtype="<u8")
        hists.append(CliqueHistogram(counts.reshape(side, side).astype(np.int64),
                                     drop_bits, layer, layer == 0))
    schedule = schedule_from_steps(steps)
    return ace_model.AceModel(schedule, tuple(luts), tuple(hists), bits,
                              drop_bits, bool(wedge), seed)


def _read_file(path: str) -> bytes:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    return p.read_bytes()


def cmd_train(args) -> int:
    image = load_pgm(_read_file(args.in_path))

    def report(layer, seconds):
        print(f"layer {layer}: trained in {seconds:.3f} s")

    m = ace_model.train(image, args.layers, args.bits, args.hist_drop,
                        args.seed, wedge=args.wedge, on_layer=report)
    Path(args.out_path).write_bytes(save_model(m))
    print(f"wrote {args.out_path}")
    return 0


def cmd_apply(args) -> int:
    m = load_model(_read_file(args.model))
    image = load_pgm(_read_file(args.in_path))
    mask = None if args.layer is None else {args.layer}
    if mask is not None and args.layer >= m.n_layers:
        raise ContractError(f"--layer {args.layer} out of range for a "
                            f"{m.n_layers}-layer model")
    lp = ace_model.anomaly_image(m, image, mask)
    Path(args.out_path).write_bytes(save_pgm(ace_model.render(lp, invert=args.invert)))
    total = ace_model.log_q_direct(m, image, mask)
    print(f"log_q_total = {total:.6f}")
    print(f"wrote {args.out_path}")
    return 0


def cmd_inspect(args) -> int:
    m = load_model(_read_file(args.model))
    wedge = "on" if m.wedge_applied else "off"
    print(f"layers {m.n_layers}  bits {m.bits}  hist-drop {m.drop_bits}  "
          f"wedge {wedge}  seed {m.seed}")
    for step, hist, field in zip(m.schedule.steps, m.histograms,
                                 m.schedule.receptive_fields):
        occupancy = np.count_nonzero(hist.counts) / hist.counts.size
        rows = hist.counts.sum(axis=1)
        cols = hist.counts.sum(axis=0)
        print(f"layer {step.layer_index}  {step.orientation.value:<11}  "
              f"sep {step.separation}  occupancy {occupancy:.4f}  "
              f"entropy {_entropy_bits(rows):.2f}/{_entropy_bits(cols):.2f} bits  "
              f"field {field[0]}x{field[1]}")
    return 0


def _entropy_bits(counts) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-np.sum(p * np.log2(p)))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ace",
                                     description="Texture anomaly imaging "
                                                 "by hierarchical density estimation")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a model on a PGM image")
    p_train.add_argument("--in", dest="in_path", required=True, metavar="PGM")
    p_train.add_argument("--out", dest="out_path", required=True, metavar="MODEL")
    p_train.add_argument("--layers", type=int, default=6)
    p_train.add_argument("--bits", type=int, default=8)
    p_train.add_argument("--hist-drop", type=int, default=2)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--wedge", action=argparse.BooleanOptionalAction, default=True)
    p_train.set_defaults(func=cmd_train)

    p_apply = sub.add_parser("apply", help="render an anomaly image")
    p_apply.add_argument("--model", required=True)
    p_apply.add_argument("--in", dest="in_path", required=True, metavar="PGM")
    p_apply.add_argument("--out", dest="out_path", required=True, metavar="PGM")
    p_apply.add_argument("--layer", type=int, default=None,
                         help="restrict to one layer's contribution")
    p_apply.add_argument("--invert", action=argparse.BooleanOptionalAction,
                         default=True, help="white = anomalous (default on)")
    p_apply.set_defaults(func=cmd_apply)

    p_inspect = sub.add_parser("inspect", help="describe a stored model")
    p_inspect.add_argument("--model", required=True)
    p_inspect.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "layers", None) is not None and not 1 <= args.layers <= 12:
        parser.error("--layers must be in [1, 12]")
    if getattr(args, "layer", None) is not None and args.layer < 0:
        parser.error("--layer must be >= 0")
    try:
        return args.func(args)
    except (FileNotFoundError, OSError, PgmParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ContractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
