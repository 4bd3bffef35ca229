import numpy as np
import pytest

from vectra.colorspace import color_distance, rgb_to_hsi, RgbPixel
from vectra.errors import ValidationError
from vectra.regions import (
    GrowthParams,
    connect_adjacent,
    label_components,
    mean_region_color,
    region_grow,
    remove_small_holes,
    remove_small_regions,
)

from oracles import flood_fill_labels, replay_region_growth


def _mask(rows):
    return np.array([[c == "#" for c in row] for row in rows])


def test_single_pixel():
    labels, table = label_components(_mask(["....", ".#..", "...."]))
    assert table.n_foreground == 1
    assert table.fg_areas[1] == 1
    assert labels[1, 1] == 1


def test_diagonal_touch_is_one_region():
    labels, table = label_components(_mask(["#.", ".#"]))
    assert table.n_foreground == 1
    assert (labels > 0).sum() == 2


def test_labels_match_flood_fill_oracle():
    rng = np.random.default_rng(61)
    for _ in range(200):
        mask = rng.random((16, 16)) < rng.uniform(0.2, 0.7)
        labels, table = label_components(mask)
        expected, n = flood_fill_labels(mask, diagonal=True)
        assert table.n_foreground == n
        assert (labels == expected).all()
        areas = np.bincount(expected.ravel(), minlength=n + 1)
        assert (table.fg_areas[1:] == areas[1:]).all()


def test_background_labels_4_connectivity():
    mask = _mask([
        "#####",
        "#...#",
        "#.#.#",
        "#...#",
        "#####",
    ])
    _, table = label_components(mask)
    expected, n = flood_fill_labels(~mask, diagonal=False)
    assert table.n_background == n
    assert (table.bg_labels == expected).all()


def test_hole_flags():
    donut = _mask([
        ".....",
        ".###.",
        ".#.#.",
        ".###.",
        ".....",
    ])
    _, table = label_components(donut)
    holes = [k for k in range(1, table.n_background + 1) if table.bg_is_hole[k]]
    assert len(holes) == 1
    assert table.bg_areas[holes[0]] == 1
    # border-touching background is never a hole
    border_bg = table.bg_labels[0, 0]
    assert not table.bg_is_hole[border_bg]


def test_remove_small_regions_boundary():
    mask = np.zeros((10, 10), dtype=bool)
    mask[1, 1:4] = True  # area 3
    mask[5:7, 5:8] = True  # area 6
    _, table = label_components(mask)
    out = remove_small_regions(mask, table, 4)
    assert not out[1, 1:4].any()  # area 3 < 4 removed
    assert out[5:7, 5:8].all()  # area 6 >= 4 kept
    out_eq = remove_small_regions(mask, table, 3)
    assert out_eq[1, 1:4].all()  # area == threshold survives ("menor a")


def test_remove_small_regions_against_oracle():
    rng = np.random.default_rng(67)
    for _ in range(50):
        mask = rng.random((16, 16)) < 0.4
        _, table = label_components(mask)
        out = remove_small_regions(mask, table, 5)
        labels, n = flood_fill_labels(mask, diagonal=True)
        areas = np.bincount(labels.ravel(), minlength=n + 1)
        expected = np.zeros_like(mask)
        for k in range(1, n + 1):
            if areas[k] >= 5:
                expected |= labels == k
        assert (out == expected).all()
        # never creates foreground
        assert not (out & ~mask).any()


def test_remove_small_holes():
    donut = _mask([
        ".......",
        ".#####.",
        ".#...#.",
        ".#.#.#.",
        ".#...#.",
        ".#####.",
        ".......",
    ])
    _, table = label_components(donut)
    filled = remove_small_holes(donut, table, 9)
    assert filled[2:5, 2:6].all()  # 7-pixel hole < 9 filled
    _, table = label_components(donut)
    kept = remove_small_holes(donut, table, 7)
    assert not kept[2, 2]  # hole area 7 not < 7


def test_border_background_never_filled():
    mask = _mask([
        "###",
        "#.#",
        "#.#",  # gap opens to the bottom border
        "#.#",
    ])
    _, table = label_components(mask)
    out = remove_small_holes(mask, table, 100)
    assert (out == mask).all()


def test_one_pixel_hole():
    blob = _mask([
        "###",
        "#.#",
        "###",
    ])
    _, table = label_components(blob)
    assert remove_small_holes(blob, table, 2).all()


# -- connect_adjacent ---------------------------------------------------------


def test_connect_between_flanking_pixels():
    mask = _mask(["#.#"])
    out = connect_adjacent(mask)
    assert out.all()


def test_single_neighbor_unchanged():
    mask = _mask(["#.."])
    assert (connect_adjacent(mask) == mask).all()


def test_one_pixel_gap_closes_two_pixel_gap_stays():
    one_gap = _mask([
        "......",
        "##.###",
        "......",
    ])
    out = connect_adjacent(one_gap)
    labels, n = flood_fill_labels(out, diagonal=True)
    assert n == 1

    two_gap = _mask([
        "......",
        "##..##",
        "......",
    ])
    out2 = connect_adjacent(two_gap)
    assert (out2 == two_gap).all()
    _, n2 = flood_fill_labels(out2, diagonal=True)
    assert n2 == 2


def test_connect_single_pass_not_fixpoint():
    # Activation counts neighbors in the INPUT only; pixels that gain two
    # neighbors through this pass's own activations stay background.
    mask = _mask([
        "#..",
        "#.#",
        "#..",
    ])
    out = connect_adjacent(mask)
    expected = mask.copy()
    expected[1, 1] = True  # west + east input neighbors
    assert (out == expected).all()
    # (1, 0) and (1, 2) gained their second neighbor only via the output;
    # a second application would add them, the single pass must not.
    assert not out[0, 1] and not out[2, 1]
    again = connect_adjacent(out)
    assert again[0, 1] and again[2, 1]


def test_connect_superset():
    rng = np.random.default_rng(71)
    for _ in range(20):
        mask = rng.random((12, 12)) < 0.3
        out = connect_adjacent(mask)
        assert not (mask & ~out).any()


# -- mean color ---------------------------------------------------------------


def test_mean_uniform_region():
    img = np.full((4, 4, 3), (0.3, 0.6, 0.9))
    mask = np.zeros((4, 4), dtype=bool)
    mask[1:3, 1:3] = True
    assert mean_region_color(img, mask) == pytest.approx((0.3, 0.6, 0.9))


def test_mean_two_pixels():
    img = np.zeros((1, 2, 3))
    img[0, 1] = (1, 1, 1)
    mask = np.ones((1, 2), dtype=bool)
    assert mean_region_color(img, mask) == pytest.approx((0.5, 0.5, 0.5))


def test_mean_matches_summation():
    rng = np.random.default_rng(73)
    img = rng.random((9, 9, 3))
    mask = rng.random((9, 9)) < 0.5
    mask[0, 0] = True
    got = mean_region_color(img, mask)
    total = np.zeros(3)
    count = 0
    for y in range(9):
        for x in range(9):
            if mask[y, x]:
                total += img[y, x]
                count += 1
    assert got == pytest.approx(tuple(total / count))


def test_mean_empty_mask_rejected():
    with pytest.raises(ValidationError):
        mean_region_color(np.ones((3, 3, 3)), np.zeros((3, 3), dtype=bool))


# -- region growing -----------------------------------------------------------


def _grow_oracle(image, seed, d_max):
    def label_fn(mask):
        return flood_fill_labels(mask, diagonal=True)

    def hsi_fn(rgb):
        return rgb_to_hsi(RgbPixel(*rgb))

    return replay_region_growth(image, seed, d_max, hsi_fn, color_distance, label_fn)


def test_identical_neighbor_admitted():
    img = np.full((3, 3, 3), 0.5)
    seed = np.zeros((3, 3), dtype=bool)
    seed[1, 1] = True
    out = region_grow(img, seed, GrowthParams(d_max=0.0))
    assert out.all()  # zero distance everywhere


def test_zero_threshold_no_growth():
    img = np.zeros((3, 3, 3))
    img[1, 1] = (1, 1, 1)
    seed = np.zeros((3, 3), dtype=bool)
    seed[1, 1] = True
    out = region_grow(img, seed, GrowthParams(d_max=0.0))
    assert (out == seed).all()


def test_empty_seed_rejected():
    with pytest.raises(ValidationError):
        region_grow(np.ones((3, 3, 3)), np.zeros((3, 3), dtype=bool), GrowthParams(1.0))


def test_two_tone_growth_matches_oracle():
    img = np.empty((8, 8, 3))
    img[:, :4] = (0.2, 0.3, 0.8)
    img[:, 4:] = (0.8, 0.3, 0.2)
    seed = np.zeros((8, 8), dtype=bool)
    seed[3, 1] = True
    tone_gap = color_distance(
        rgb_to_hsi(RgbPixel(0.2, 0.3, 0.8)), rgb_to_hsi(RgbPixel(0.8, 0.3, 0.2))
    )
    params = GrowthParams(d_max=tone_gap / 2)
    out = region_grow(img, seed, params)
    expected = np.zeros((8, 8), dtype=bool)
    expected[:, :4] = True
    assert (out == expected).all()
    _, oracle_mask = _grow_oracle(img, seed, tone_gap / 2)
    assert (out == oracle_mask).all()


def test_growth_admission_order_matches_replay():
    rng = np.random.default_rng(79)
    for trial in range(12):
        img = np.round(rng.random((8, 8, 3)) * 4) / 4  # few distinct colors
        seed = np.zeros((8, 8), dtype=bool)
        seed[rng.integers(0, 8), rng.integers(0, 8)] = True
        seed[rng.integers(0, 8), rng.integers(0, 8)] = True
        d_max = rng.uniform(0.05, 0.4)
        out = region_grow(img, seed, GrowthParams(d_max))
        _, oracle_mask = _grow_oracle(img, seed, d_max)
        assert (out == oracle_mask).all(), f"trial {trial}"


def test_growth_superset_and_budget():
    rng = np.random.default_rng(83)
    img = rng.random((10, 10, 3))
    seed = np.zeros((10, 10), dtype=bool)
    seed[5, 5] = True
    grown = region_grow(img, seed, GrowthParams(d_max=2.0))
    assert not (seed & ~grown).any()
    capped = region_grow(img, seed, GrowthParams(d_max=2.0, max_pixels=3))
    assert capped.sum() == seed.sum() + 3
