import json

import numpy as np
import pytest

from odo_lab.game import ContractError, best_response, solve_zero_sum_ne
from odo_lab.games import (
    KUHN_OFFSET,
    KUHN_SCALE,
    GameSpec,
    MatrixFormatError,
    biased_rps,
    generate,
    kuhn_normal_form,
    load_csv,
    load_game,
    random_matrix,
    restrict_columns,
    save_csv,
    save_game,
)


def test_rps_convention():
    A = generate(GameSpec("rps")).matrix
    np.testing.assert_array_equal(np.diag(A), [0.5] * 3)
    assert A[0, 1] == 1.0  # Rock vs Paper
    assert A[1, 0] == 0.0
    np.testing.assert_array_equal(A + A.T, np.ones((3, 3)))


def test_matching_pennies():
    np.testing.assert_array_equal(generate(GameSpec("matching_pennies")).matrix, [[0, 1], [1, 0]])


def test_biased_rps_is_valid_and_unbiased_case_is_rps():
    np.testing.assert_array_equal(biased_rps([1, 1, 1]), generate(GameSpec("rps")).matrix)
    B = biased_rps([1, 2, 3])
    assert B.min() >= 0 and B.max() <= 1
    sol = solve_zero_sum_ne(B)
    assert not np.allclose(sol.row_strategy, 1 / 3, atol=1e-3)


def test_random_generation_is_deterministic():
    a = generate(GameSpec("random", 4, 6, seed=17)).matrix
    b = generate(GameSpec("random", 4, 6, seed=17)).matrix
    assert a.shape == (4, 6)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, generate(GameSpec("random", 4, 6, seed=18)).matrix)


def test_random_entries_are_uniform():
    A = random_matrix(1000, 5, 0)
    assert A.min() >= 0 and A.max() <= 1
    assert 0.48 <= A.mean() <= 0.52


@pytest.mark.parametrize("spec", [
    GameSpec("nope"),
    GameSpec("random", 0, 3),
    GameSpec("biased_rps", weights=(1.0, -1.0, 2.0)),
    GameSpec("biased_rps", weights=(1.0, 2.0)),
    GameSpec("csv"),
])
def test_invalid_specs(spec):
    with pytest.raises(ContractError):
        generate(spec)


# Kuhn ------------------------------------------------------------------------------

@pytest.fixture(scope="module")
def kuhn():
    return kuhn_normal_form()


def test_kuhn_shape_range_and_labels(kuhn):
    A = kuhn.matrix
    assert A.shape == (64, 64)
    assert A.min() >= 0 and A.max() <= 1
    assert len(kuhn.row_labels) == 64 and len(set(kuhn.row_labels)) == 64
    assert kuhn.row_labels[0] == "J:cf Q:cf K:cf"
    assert (kuhn.offset, kuhn.scale) == (KUHN_OFFSET, KUHN_SCALE)


@pytest.mark.parametrize("tol", [1e-8, 1e-10])
def test_kuhn_value(kuhn, tol):
    sol = solve_zero_sum_ne(kuhn.matrix, tol)
    # player 1 wins -1/18 chips, so expects to lose 1/18
    assert kuhn.native(sol.value) == pytest.approx(1 / 18, abs=10 * tol)
    assert sol.value == pytest.approx((1 / 18 + 2) / 4, abs=10 * tol)


def test_kuhn_is_not_symmetric(kuhn):
    A = kuhn.matrix
    assert not np.allclose(A, A.T)
    assert not np.allclose(A + A.T, 1.0)


def test_kuhn_always_check_fold_against_always_bet():
    # player 1 checks and folds to bets with every card; player 2 bets whenever checked to
    g = kuhn_normal_form()
    i = g.row_labels.index("J:cf Q:cf K:cf")
    j = g.col_labels.index("J:bf Q:bf K:bf")
    assert g.native(g.matrix[i, j]) == pytest.approx(1.0)


# restriction -------------------------------------------------------------------------

def test_restrict_full_and_single(kuhn):
    A = random_matrix(5, 7, 1)
    full, kept = restrict_columns(A, 7, 3)
    np.testing.assert_array_equal(full, A)
    np.testing.assert_array_equal(kept, np.arange(7))
    one, kept = restrict_columns(A, 1, 3)
    assert one.shape == (5, 1)
    assert best_response(one[:, 0])[0] == int(np.argmin(A[:, kept[0]]))


def test_restrict_reproducible_on_kuhn(kuhn):
    a, ka = restrict_columns(kuhn.matrix, 20, 4)
    b, kb = restrict_columns(kuhn.matrix, 20, 4)
    np.testing.assert_array_equal(ka, kb)
    np.testing.assert_array_equal(a, b)
    assert len(set(ka.tolist())) == 20 and np.all(np.diff(ka) > 0)


@pytest.mark.parametrize("size", [0, 8])
def test_restrict_out_of_range(size):
    with pytest.raises(ContractError):
        restrict_columns(random_matrix(3, 7, 0), size, 0)


# CSV ------------------------------------------------------------------------------

def test_csv_round_trip_rps(tmp_path):
    A = generate(GameSpec("rps")).matrix
    save_csv(A, tmp_path / "rps.csv")
    np.testing.assert_array_equal(load_csv(tmp_path / "rps.csv"), A)


def test_csv_round_trip_is_bitwise(tmp_path):
    A = random_matrix(50, 50, 123)
    save_csv(A, tmp_path / "r.csv")
    B = load_csv(tmp_path / "r.csv")
    assert B.tobytes() == A.tobytes()


def test_csv_out_of_range_entry(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("0.1,0.2\n0.3,1.5\n")
    with pytest.raises(MatrixFormatError) as info:
        load_csv(p)
    assert (info.value.line, info.value.col) == (2, 2)


@pytest.mark.parametrize("text, where", [
    ("0.1,abc\n", (1, 2)),
    ("0.1,0.2\n0.3\n", (2, None)),
])
def test_csv_parse_errors(tmp_path, text, where):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(MatrixFormatError) as info:
        load_csv(p)
    assert (info.value.line, info.value.col) == where


def test_csv_empty_file(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("\n")
    with pytest.raises(MatrixFormatError):
        load_csv(p)


def test_game_sidecar_round_trip(tmp_path, kuhn):
    path = tmp_path / "kuhn.csv"
    save_game(kuhn, path)
    meta = json.loads((tmp_path / "kuhn.csv.meta").read_text())
    assert meta["offset"] == KUHN_OFFSET and meta["scale"] == KUHN_SCALE
    back = load_game(path)
    np.testing.assert_array_equal(back.matrix, kuhn.matrix)
    assert back.row_labels == kuhn.row_labels
    assert back.native(0.5) == kuhn.native(0.5)
    via_spec = generate(GameSpec("csv", path=str(path)))
    np.testing.assert_array_equal(via_spec.matrix, kuhn.matrix)
