import csv
import io
import random

import pytest

import mrpods


def small_sheet():
    config = mrpods.SheetConfig()
    config.page_width_in = 3.0
    config.page_height_in = 3.0
    return config


def test_compress_round_trip():
    rng = random.Random(7)
    data = bytes(rng.choice(b"abcde ") for _ in range(20000))
    packed = mrpods.compress(data)
    assert packed[:4] == b"MRP1"
    assert len(packed) < len(data)
    assert mrpods.container_length(packed + b"\0" * 9) == len(packed)
    assert mrpods.decompress(packed) == data


def test_decompress_rejects_garbage():
    with pytest.raises(mrpods.Error):
        mrpods.decompress(b"not a container")


def test_reed_solomon_corrects_errors_and_erasures():
    rng = random.Random(3)
    data = bytes(rng.randrange(256) for _ in range(180))
    word = bytearray(mrpods.rs_encode(data, 216, 180))
    assert len(word) == 216 and bytes(word[:180]) == data
    for pos in rng.sample(range(216), 18):
        word[pos] ^= 0x5A
    out, errors, erasures = mrpods.rs_decode(bytes(word), 216, 180)
    assert out == data and errors == 18 and erasures == 0

    word = bytearray(mrpods.rs_encode(data, 216, 180))
    lost = rng.sample(range(216), 37)
    for pos in lost:
        word[pos] = 0
    with pytest.raises(mrpods.Error):
        mrpods.rs_decode(bytes(word), 216, 180, lost)
    word[lost[36]] = mrpods.rs_encode(data, 216, 180)[lost[36]]
    out, _, erasures = mrpods.rs_decode(bytes(word), 216, 180, lost[:36])
    assert out == data and erasures == 36


def test_sheet_config_validation():
    config = mrpods.SheetConfig()
    config.redundancy = "1:10"
    assert config.redundancy == "1:10"
    config.dots_per_inch = 5
    with pytest.raises(mrpods.Error):
        config.validate()


def test_capacity_of_default_letter_page():
    report = mrpods.page_capacity(mrpods.SheetConfig())
    assert (report["grid_cols"], report["grid_rows"]) == (1700, 2200)
    assert (report["rs_n"], report["rs_k"]) == (216, 180)
    assert 0 < report["usable_payload_bytes"] < report["raw_dots"] // 8
    assert "usable payload" in report["itemized"]


def test_encode_decode_pages_any_order():
    rng = random.Random(11)
    data = bytes(rng.randrange(256) for _ in range(40000))
    config = small_sheet()
    pages = mrpods.encode_pages(data, config)
    assert len(pages) >= 2
    assert all(p[:4] == b"\x89PNG" for p in pages)
    result = mrpods.decode_images(list(reversed(pages)))
    assert result["status"] == "complete"
    assert result["data"] == data

    partial = mrpods.decode_images(pages[1:])
    assert partial["status"] == "partial"
    assert partial["missing_pages"] == [0]


def test_degraded_page_still_decodes():
    data = b"printed archive " * 200
    page = mrpods.encode_pages(data, small_sheet())[0]
    profile = mrpods.DegradationProfile.parse("office-scan")
    profile.seed = 5
    scanned = mrpods.degrade_png(page, profile)
    assert scanned != page
    assert mrpods.decode_images([scanned])["data"] == data


def test_cost_model_crossover_matches_scan():
    year = mrpods.crossover_year(page_cost=3.0, pages=20)
    assert year is not None
    assert mrpods.hdd_cumulative_cost(year) > 60.0
    assert year == 0 or mrpods.hdd_cumulative_cost(year - 1) <= 60.0
    assert mrpods.crossover_year(page_cost=1e9, pages=20) is None

    rows = list(csv.DictReader(io.StringIO(mrpods.cost_over_time_csv())))
    assert len(rows) == 101
    assert float(rows[0]["hdd_cumulative_usd"]) == 40.0
    assert {row["print_fixed_usd"] for row in rows} == {"60"}


def test_fig2_series_is_monotone():
    rows = list(csv.DictReader(io.StringIO(mrpods.pages_and_cost_csv([0.5, 1, 2, 4, 8]))))
    pages = [int(r["pages"]) for r in rows]
    assert pages == sorted(pages) and pages[0] >= 1
