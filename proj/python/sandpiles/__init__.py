"""Integer least-action sandpile solver with its exact continuum companion.

The heavy lifting lives in the compiled extension; this package adds json
decoding for the report-returning calls.
"""

import json as _json

from ._core import (  # noqa: F401
    DomainMask,
    IntField,
    Solution,
    SuperSolution,
    Window,
    __version__,
    brute_force_bound,
    brute_force_least,
    build_mask,
    burning_pass,
    ifs_generate,
    laplacian,
    laplacian_at,
    mask_from_points,
    read_igf1,
    render_ppm,
    shift_cutoff,
    solve_least,
    stabilize,
    write_igf1,
)
from . import _core


def solve_stats(solution):
    return _json.loads(solution.stats_json)


def pieces(ss, with_values=True):
    return _json.loads(_core.pieces_json(ss, with_values))


def patch_decay(ss):
    return _json.loads(_core.patch_decay_json(ss))


def detect_period(image, cells, bound):
    s = _core.detect_period_json(image, cells, bound)
    return None if s is None else _json.loads(s)


def match_fraction(image, pattern, cells, r, threads=1):
    if not isinstance(pattern, str):
        pattern = _json.dumps(pattern)
    return _json.loads(_core.match_fraction_json(image, pattern, cells, r, threads))


def convergence_report(shape, ns, depth, threads=1):
    return _json.loads(_core.convergence_report_json(shape, list(ns), depth, threads))
