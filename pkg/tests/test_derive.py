"""Derivation solver tests against independently computed reference values.

The pinned numbers below were produced by a standalone prototype (dense-grid
minimax search plus high-resolution bisection) before this module existed;
they are regression anchors, not copies of this code's output.
"""
import math
import time

import pytest

from fisr.derive import (
    BracketError,
    RootProblem,
    bisect,
    derive_all,
    grid_max_error,
    rel_k0_candidates,
    solve_abs_k0,
    solve_abs_k1,
    solve_abs_k2,
    solve_rel_k0,
    solve_rel_k1,
    solve_rel_k2,
    verify_rel_k2_matches_k1,
)

# (objective, k) -> (t, magic, predicted max error)
REFERENCE = {
    ("relative", 0): (3.730979559837773, 0x5F37642F, 0.034212813317838986),
    ("relative", 1): (3.729800339160557, 0x5F375A86, 0.001751183671220393),
    ("relative", 2): (3.729800339160557, 0x5F375A86, 4.597281246855073e-06),
    ("absolute", 0): (3.762203155904598, 0x5F3863F7, 0.02972460551192524),
    ("absolute", 1): (3.7469913827742034, 0x5F37E75A, 0.0014844967945076735),
    ("absolute", 2): (3.7399698624890423, 0x5F37ADD5, 3.683998344026234e-06),
}


def test_bisect_simple_root():
    root = bisect(RootProblem(lambda x: x * x * x - 2.0, 0.0, 2.0))
    assert math.isclose(root, 2.0 ** (1.0 / 3.0), abs_tol=1e-11)


def test_bisect_returns_exact_endpoint():
    assert bisect(RootProblem(lambda x: x - 1.0, 1.0, 3.0)) == 1.0
    assert bisect(RootProblem(lambda x: x - 3.0, 1.0, 3.0)) == 3.0


def test_bisect_rejects_unbracketed():
    with pytest.raises(BracketError):
        bisect(RootProblem(lambda x: x * x + 1.0, -1.0, 1.0))


@pytest.mark.parametrize("solver,key", [
    (solve_rel_k0, ("relative", 0)),
    (solve_rel_k1, ("relative", 1)),
    (solve_rel_k2, ("relative", 2)),
    (solve_abs_k0, ("absolute", 0)),
    (solve_abs_k1, ("absolute", 1)),
    (solve_abs_k2, ("absolute", 2)),
])
def test_solvers_match_reference(solver, key):
    t_ref, magic_ref, err_ref = REFERENCE[key]
    r = solver()
    assert (r.objective, r.iterations) == key
    assert r.magic == magic_ref
    assert math.isclose(r.t_opt, t_ref, abs_tol=1e-9)
    assert math.isclose(r.predicted_max_error, err_ref, rel_tol=1e-9)
    assert abs(r.balance_residual) < 1e-11


def test_abs_k0_closed_forms():
    r = solve_abs_k0()
    assert math.isclose(r.t_opt, -1.0 + 3.0 * 2.0 ** (2.0 / 3.0), abs_tol=1e-15)
    assert math.isclose(r.predicted_max_error,
                        5.0 / 8.0 - 3.0 / (4.0 * 2.0 ** (1.0 / 3.0)),
                        abs_tol=1e-15)


def test_rel_k0_rejected_candidate_is_worse():
    cand1, cand2 = rel_k0_candidates()
    assert cand1.balance == "region1-peak"
    assert not cand1.within_validity
    assert cand2.within_validity
    assert math.isclose(cand1.t, 3.736190342176023, abs_tol=1e-9)
    assert math.isclose(cand1.grid_max_error, 0.035258599082766295, rel_tol=1e-6)
    assert math.isclose(cand2.grid_max_error, 0.034212813317838986, rel_tol=1e-9)
    assert cand1.grid_max_error > cand2.grid_max_error


def test_shared_rel_root_validated_independently():
    check = verify_rel_k2_matches_k1()
    assert check.difference < 1e-9
    assert abs(check.residual_k1) < 1e-12
    assert abs(check.residual_k2) < 1e-15


def test_grid_max_matches_prediction_at_optimum():
    # one binding extremum always sits on a grid point (x=1, x=2 or x=t),
    # so the dense-grid max reproduces the prediction essentially exactly
    for r in derive_all():
        measured = grid_max_error(r.t_opt, r.iterations, r.objective)
        assert math.isclose(measured, r.predicted_max_error, rel_tol=1e-9)


def test_grid_max_rejects_unknown_objective():
    with pytest.raises(ValueError):
        grid_max_error(3.73, 0, "ulp")


def test_derive_all_order_and_speed(derivations):
    assert [(r.objective, r.iterations) for r in derivations] == [
        ("relative", 0), ("relative", 1), ("relative", 2),
        ("absolute", 0), ("absolute", 1), ("absolute", 2),
    ]
    start = time.perf_counter()
    derive_all()
    assert time.perf_counter() - start < 1.0


def test_derived_magics_are_model_valid(derivations):
    for r in derivations:
        assert (r.magic >> 23) == 190       # exponent field 63 + bias
        assert (r.magic & 0x7FFFFF) < 1 << 22  # fractional mantissa below 1/2
