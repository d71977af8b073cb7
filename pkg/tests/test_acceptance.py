"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines. The bundled shape families are measured once per session and reused
across criteria.
"""
from __future__ import annotations

import math

import numpy as np
import pytest

from congruity import (
    Histogram,
    ScreenedPoissonProblem,
    build_histogram,
    congruity_measure,
    distance_transform,
    relative_residual,
    shannon_entropy,
    solve_screened_poisson,
    solve_with_residual,
)
from congruity.cli import main as cli_main
from congruity.shapes import composite_cube_set, deviation_set, make_cube
from congruity.measure import order_shapes

from conftest import (
    brute_force_distance,
    dense_oracle_solution,
    random_volume,
    rotate_quarter,
    translate_one,
)


def _criterion(number: int, description: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {number:2d} {status}: {description}{suffix}")
    assert passed, f"criterion {number} failed: {description}{suffix}"


@pytest.fixture(scope="session")
def bundled():
    """Measure both bundled families once: {name: (volume, result)}."""
    shapes = composite_cube_set() + deviation_set()
    return {name: (volume, congruity_measure(volume)) for name, volume in shapes}


def test_criterion_1_solver_matches_dense_oracle(bundled, session_rng):
    worst = 0.0
    for trial in range(22):
        dim = 2 if trial % 2 == 0 else 3
        vol = random_volume(session_rng, dim, min_extent=4,
                            max_extent=12 if dim == 2 else 9)
        assert vol.interior_count <= 1000
        rho = float(session_rng.uniform(0.5, 100.0))
        expected, positions = dense_oracle_solution(vol, rho)
        field = solve_screened_poisson(ScreenedPoissonProblem(vol, rho))
        worst = max(worst, float(np.abs(field.values[tuple(positions.T)] - expected).max()))

    residual_worst = max(
        max(result.residuals) for _, result in bundled.values()
    )
    # independent recomputation on two representative shapes
    for name in ("ball", "attach6"):
        volume, result = bundled[name]
        for rho in result.rho:
            problem = ScreenedPoissonProblem(volume, rho)
            field, _ = solve_with_residual(problem)
            residual_worst = max(residual_worst, relative_residual(problem, field))

    _criterion(
        1, "solver matches dense oracle and meets the residual bound",
        worst <= 1e-10 and residual_worst <= 1e-10,
        f"max |dv|={worst:.2e}, max residual={residual_worst:.2e}",
    )


def test_criterion_2_deep_interior_analytic_value():
    problem = ScreenedPoissonProblem(make_cube(61, padding=1), rho=2.0)
    field = solve_screened_poisson(problem)
    center = float(field.values[31, 31, 31])
    _criterion(
        2, "61^3 cube with rho=2 reaches rho^2 at the center within 1%",
        abs(center - 4.0) / 4.0 <= 0.01,
        f"center={center:.6f}",
    )


def test_criterion_3_distance_matches_brute_force(session_rng):
    exact = True
    for trial in range(22):
        dim = 2 if trial % 2 == 0 else 3
        vol = random_volume(
            session_rng, dim, min_extent=4,
            max_extent=20 if dim == 3 else 60,
            spacing=float(session_rng.choice([0.5, 1.0, 2.0])),
        )
        assert vol.voxel_count <= 10_000
        if not np.array_equal(distance_transform(vol).values, brute_force_distance(vol)):
            exact = False
            break
    _criterion(3, "distance transform equals brute force exactly on 22 random grids",
               exact)


def test_criterion_4_entropy_identities(bundled):
    single = shannon_entropy(Histogram(np.array([17]))) == 0.0
    uniform = all(
        shannon_entropy(build_histogram(np.arange(2**k) / 2**k, 2**k)) == float(k)
        for k in range(1, 9)
    )
    split = abs(shannon_entropy(Histogram(np.array([3, 1]))) - 0.811278) <= 1e-6
    split_tight = shannon_entropy(Histogram(np.array([3, 1]))) == pytest.approx(
        0.8112781244591328, abs=1e-9
    )
    in_range = all(
        (result.entropies >= 0).all()
        and (result.entropies <= math.log2(result.config.bin_count)).all()
        for _, result in bundled.values()
    )
    _criterion(4, "entropy identities and range bounds hold",
               single and uniform and split and bool(split_tight) and in_range)


def test_criterion_5_ball_minimal_and_deviation_chain(bundled):
    chain = ["ball", "cube", "cube_attachment", "cube_attachment_concave"]
    results = {name: bundled[name][1] for name in chain}
    others = [name for name in bundled if name != "ball"]
    ball = results["ball"].entropies
    minimal = all((ball < bundled[name][1].entropies).all() for name in others)
    ordered = all(
        (results[a].entropies < results[b].entropies).all()
        for a, b in zip(chain, chain[1:])
    )
    ordering = order_shapes([(name, results[name]) for name in chain])
    consensus = ordering.consensus and ordering.by_mean == tuple(chain)
    _criterion(
        5, "ball attains the smallest entropies; deviation chain ordered in "
           "all four measures with consensus",
        minimal and ordered and consensus,
    )


def test_criterion_6_means_rise_with_added_parts(bundled):
    means = [bundled[name][1].mean_entropy
             for name in ("attach0", "attach1", "attach2_nonfacing", "attach3")]
    _criterion(
        6, "mean entropy strictly increases over 0, 1, 2 (non-facing), 3 attachments",
        all(a < b for a, b in zip(means, means[1:])),
        " -> ".join(f"{m:.4f}" for m in means),
    )


def test_criterion_7_harmony_dips(bundled):
    mean = {k: bundled[f"attach{n}"][1].mean_entropy for k, n in
            (("3", 3), ("4", 4), ("5", 5), ("6", 6))}
    _criterion(
        7, "symmetric 4- and 6-attachment arrangements dip below 3 and 5",
        mean["4"] < mean["3"] and mean["6"] < mean["5"],
        f"4:{mean['4']:.4f} < 3:{mean['3']:.4f}, 6:{mean['6']:.4f} < 5:{mean['5']:.4f}",
    )


def test_criterion_8_facing_pair_below_nonfacing(bundled):
    facing = bundled["attach2_facing"][1].entropies
    nonfacing = bundled["attach2_nonfacing"][1].entropies
    _criterion(
        8, "all four entropies are smaller when attachments face each other",
        bool((facing < nonfacing).all()),
        f"margins {np.array2string(nonfacing - facing, precision=4)}",
    )


def test_criterion_9_rotation_and_translation_invariance(bundled):
    worst_rotation = 0.0
    translation_exact = True
    for name, (volume, result) in bundled.items():
        rotated = congruity_measure(rotate_quarter(volume))
        worst_rotation = max(
            worst_rotation, float(np.abs(rotated.entropies - result.entropies).max())
        )
        translated = congruity_measure(translate_one(volume))
        if not (np.array_equal(translated.entropies, result.entropies)
                and translated.mean_entropy == result.mean_entropy
                and translated.band_sizes == result.band_sizes):
            translation_exact = False
    _criterion(
        9, "rotations shift each entropy by < 1e-8; translations are bit-exact",
        worst_rotation <= 1e-8 and translation_exact,
        f"max rotation delta {worst_rotation:.2e}",
    )


def test_criterion_10_repro_is_thread_invariant(tmp_path, capsys):
    first = tmp_path / "run1"
    second = tmp_path / "run2"
    assert cli_main(["repro", "--outdir", str(first), "--threads", "1"]) == 0
    assert cli_main(["repro", "--outdir", str(second), "--threads", "2"]) == 0
    capsys.readouterr()
    identical = all(
        (first / name).read_bytes() == (second / name).read_bytes()
        for name in ("composite_set.csv", "deviation_set.csv",
                     "composite_set_order.txt", "deviation_set_order.txt")
    )
    _criterion(10, "repro outputs are byte-identical across runs and thread counts",
               identical)
