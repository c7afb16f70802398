import numpy as np
import pytest

from ace.errors import ContractError
from ace.image import QuantizedImage
from ace.network import (
    LayerStep,
    Orientation,
    apply_layer,
    clique_pairs,
    make_schedule,
    pair_values,
    schedule_from_steps,
)
from ace.topomap import Lut

from _util import random_image_array


def identity_like_lut(bits):
    """LUT sending (v, v) to v; other cells map to the first operand."""
    side = 1 << bits
    table = np.repeat(np.arange(side, dtype=np.uint16), side)
    return Lut(bits, bits, table)


def random_lut(bits, out_bits, seed):
    rng = np.random.default_rng(seed)
    table = rng.integers(0, 1 << out_bits, 1 << (2 * bits)).astype(np.uint16)
    return Lut(bits, out_bits, table)


class TestMakeSchedule:
    def test_six_layer_paper_configuration(self):
        sched = make_schedule(6)
        assert [s.separation for s in sched.steps] == [1, 1, 2, 2, 4, 4]
        assert [s.orientation for s in sched.steps] == [
            Orientation.NORTH_SOUTH,
            Orientation.EAST_WEST,
        ] * 3
        assert sched.receptive_fields == (
            (1, 2), (2, 2), (2, 4), (4, 4), (4, 8), (8, 8),
        )

    def test_single_layer(self):
        sched = make_schedule(1)
        assert sched.steps[0].orientation is Orientation.NORTH_SOUTH
        assert sched.steps[0].separation == 1
        assert sched.receptive_fields == ((1, 2),)

    def test_four_layers(self):
        assert make_schedule(4).receptive_fields[-1] == (4, 4)

    def test_invariants_up_to_twelve(self):
        for n in range(1, 13):
            sched = make_schedule(n)
            seps = [s.separation for s in sched.steps]
            assert seps == [1 << (i // 2) for i in range(n)]
            for i, s in enumerate(sched.steps):
                want = Orientation.NORTH_SOUTH if i % 2 == 0 else Orientation.EAST_WEST
                assert s.orientation is want
            ews = [f[0] for f in sched.receptive_fields]
            nss = [f[1] for f in sched.receptive_fields]
            assert all(x <= y for x, y in zip(ews, ews[1:]))
            assert all(x <= y for x, y in zip(nss, nss[1:]))

    def test_range_checked(self):
        with pytest.raises(ValueError):
            make_schedule(0)
        with pytest.raises(ValueError):
            make_schedule(13)

    def test_schedule_from_steps_rejects_wrong_order(self):
        bad = [LayerStep(Orientation.EAST_WEST, 1, 0)]
        with pytest.raises(ValueError):
            schedule_from_steps(bad)


class TestApplyLayer:
    def test_constant_fixed_point(self):
        img = QuantizedImage(np.full((4, 4), 9, dtype=np.uint8), 4)
        out = apply_layer(img, identity_like_lut(4), make_schedule(1).steps[0])
        assert np.all(out.data == 9)

    def test_two_row_wraparound(self):
        a, b = 3, 12
        img = QuantizedImage(np.array([[a], [b]], dtype=np.uint8), 4)
        lut = random_lut(4, 4, seed=0)
        out = apply_layer(img, lut, LayerStep(Orientation.NORTH_SOUTH, 1, 0))
        assert out.data[0, 0] == lut.table2d[a, b]
        assert out.data[1, 0] == lut.table2d[b, a]

    def test_output_depends_only_on_documented_pair(self):
        step = LayerStep(Orientation.EAST_WEST, 1, 1)
        lut = random_lut(4, 4, seed=5)
        base_arr = random_image_array(4, 4, bits=4, seed=9)
        base = apply_layer(QuantizedImage(base_arr, 4), lut, step).data
        for pr in range(4):
            for pc in range(4):
                perturbed = base_arr.copy()
                perturbed[pr, pc] = (perturbed[pr, pc] + 1) % 16
                out = apply_layer(QuantizedImage(perturbed, 4), lut, step).data
                changed = set(map(tuple, np.argwhere(out != base)))
                allowed = {(pr, pc), (pr, (pc - 1) % 4)}
                assert changed <= allowed

    def test_translation_equivariant_on_torus(self):
        step = LayerStep(Orientation.NORTH_SOUTH, 2, 2)
        lut = random_lut(4, 4, seed=1)
        arr = random_image_array(8, 8, bits=4, seed=2)
        img = QuantizedImage(arr, 4)
        for dr, dc in [(1, 0), (0, 3), (5, 2)]:
            shifted = QuantizedImage(np.roll(arr, (dr, dc), axis=(0, 1)), 4)
            out_shifted = apply_layer(shifted, lut, step).data
            shifted_out = np.roll(apply_layer(img, lut, step).data, (dr, dc), axis=(0, 1))
            assert np.array_equal(out_shifted, shifted_out)

    def test_bit_mismatch_rejected(self):
        img = QuantizedImage(np.zeros((4, 4), dtype=np.uint8), 6)
        with pytest.raises(ContractError):
            apply_layer(img, identity_like_lut(4), make_schedule(1).steps[0])

    def test_too_small_along_axis_rejected(self):
        img = QuantizedImage(np.zeros((2, 8), dtype=np.uint8), 4)
        with pytest.raises(ContractError):
            apply_layer(img, identity_like_lut(4), LayerStep(Orientation.NORTH_SOUTH, 2, 2))

    def test_narrow_other_axis_allowed(self):
        img = QuantizedImage(np.zeros((4, 1), dtype=np.uint8), 4)
        out = apply_layer(img, identity_like_lut(4), LayerStep(Orientation.NORTH_SOUTH, 1, 0))
        assert out.data.shape == (4, 1)


class TestCliquePairs:
    def test_column_pair_enumeration(self):
        a, b = 2, 5
        img = QuantizedImage(np.array([[a], [b]], dtype=np.uint8), 4)
        pairs = clique_pairs(img, LayerStep(Orientation.NORTH_SOUTH, 1, 0))
        assert pairs == [((0, 0), a, b), ((1, 0), b, a)]

    def test_one_clique_per_pixel(self):
        img = QuantizedImage(random_image_array(6, 9, bits=4, seed=3), 4)
        for step in make_schedule(3).steps[:2]:
            assert len(clique_pairs(img, step)) == 6 * 9

    def test_layer_two_partner_separation(self):
        step = make_schedule(3).steps[2]
        assert step.separation == 2
        arr = random_image_array(8, 8, bits=4, seed=4)
        v1, v2 = pair_values(QuantizedImage(arr, 4), step)
        assert np.array_equal(v1, arr)
        assert np.array_equal(v2, np.roll(arr, -2, axis=0))
