"""Printable paper data sheets: compression, Reed-Solomon, sheet rendering and decoding."""

from ._mrpods import (
    DegradationProfile,
    Error,
    SheetConfig,
    compress,
    container_length,
    crossover_year,
    decode_images,
    decompress,
    degrade_png,
    encode_pages,
    hdd_cumulative_cost,
    page_capacity,
    pages_and_cost_csv,
    cost_over_time_csv,
    rs_decode,
    rs_encode,
)

__all__ = [
    "DegradationProfile",
    "Error",
    "SheetConfig",
    "compress",
    "container_length",
    "cost_over_time_csv",
    "crossover_year",
    "decode_images",
    "decompress",
    "degrade_png",
    "encode_pages",
    "hdd_cumulative_cost",
    "page_capacity",
    "pages_and_cost_csv",
    "rs_decode",
    "rs_encode",
]
