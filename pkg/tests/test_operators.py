import dataclasses

import numpy as np
import pytest
import scipy.sparse as sp

from qlbdecomp import classical, operators
from qlbdecomp.classical import BOUNCE_BACK, PERIODIC, Grid, PdfField
from qlbdecomp.coefficients import beta_for
from qlbdecomp.lattice import make_lattice
from qlbdecomp.operators import (
    augmented, build_B_hat, build_D_hat, build_F_hat, build_plan, build_stream_matrix, build_W_hat,
)

from conftest import random_field, small_grid

D1Q3 = make_lattice("D1Q3")
ONE_SITE = Grid(1)


def phi(df):
    return np.tile(df, 4)


def blocks(v, n_b):
    return v.reshape(4, n_b)


def test_w_single_site_example():
    df = augmented([0.6, 0.3, 0.1])
    out = build_W_hat(D1Q3, ONE_SITE) @ phi(df)
    for b in blocks(out, 4):
        np.testing.assert_allclose(b, [1.0, 1.0, 1.0, 1.0], rtol=1e-15)


def test_w_unit_density_and_auxiliary(lattice, rng):
    grid = small_grid(lattice)
    f = random_field(lattice, grid, rng)
    fd = f.per_direction / f.per_direction.sum(axis=0)
    df = augmented(fd)
    out = blocks(build_W_hat(lattice, grid) @ phi(df), df.size)
    np.testing.assert_allclose(out[:, :-1], 1.0, rtol=1e-14)
    # auxiliary slot maps to 1 whatever the populations are
    out = blocks(build_W_hat(lattice, grid) @ phi(augmented(f.data * 7.0)), df.size)
    np.testing.assert_array_equal(out[:, -1], 1.0)


def test_d_hat_examples():
    df = augmented([0.6, 0.3, 0.1])
    assert (build_D_hat(np.ones(4)).matrix != sp.identity(16)).nnz == 0
    dw = build_D_hat(df).matrix @ build_W_hat(D1Q3, ONE_SITE).matrix
    np.testing.assert_allclose(blocks(dw @ phi(df), 4)[0], [0.6, 0.3, 0.1, 1.0], rtol=1e-15)
    with pytest.raises(ValueError):
        build_D_hat(np.ones(5), D1Q3, ONE_SITE)


def test_d_hat_w_hat_gives_first_order_f_over_rho(lattice, rng):
    grid = small_grid(lattice)
    f = random_field(lattice, grid, rng)
    df = augmented(f.data)
    g = blocks(build_D_hat(df).matrix @ (build_W_hat(lattice, grid) @ phi(df)), df.size)
    rho = f.per_direction.sum(axis=0)
    for b in g:
        np.testing.assert_allclose(b[:-1].reshape(lattice.n_e, -1), f.per_direction * (2 - rho), rtol=1e-14)


def test_b_tilde_blocks():
    grid = Grid(3)
    beta = beta_for(D1Q3, 0.6)
    bt = operators.b_tilde(0, beta, grid).toarray()
    np.testing.assert_allclose(bt[:3, :3], (4 / 9) * np.eye(3), rtol=1e-15)
    bt1 = operators.b_tilde(1, beta, grid).toarray()
    assert not bt1[:9, 0:3].any()  # block column 0 < i is zero
    assert bt1[-1, -1] == 1.0 and not bt1[:-1, -1].any() and not bt1[-1, :-1].any()


def test_b_tilde_tau_one_is_alpha(lattice):
    grid = small_grid(lattice, 2)
    beta = beta_for(lattice, 1.0)
    from qlbdecomp.coefficients import alpha
    a = alpha(lattice).values
    i = lattice.n_e - 1
    bt = operators.b_tilde(i, beta, grid).toarray()
    n_g = grid.n_g
    for r in range(lattice.n_e):
        blk = bt[r * n_g:(r + 1) * n_g, i * n_g:(i + 1) * n_g]
        np.testing.assert_allclose(blk, a[r, i, i] * np.eye(n_g), rtol=1e-15)


def test_f_tilde_examples(lattice):
    grid = small_grid(lattice, 2)
    df = augmented(np.ones(lattice.n_e * grid.n_g))
    for i in range(lattice.n_e):
        ft = operators.f_tilde(i, df, lattice, grid).diagonal()
        np.testing.assert_array_equal(ft[:-1], 1.0)
        assert ft[-1] == (1.0 if i == 0 else 0.0)
    with pytest.raises(IndexError):
        operators.f_tilde(lattice.n_e, df, lattice, grid)
    with pytest.raises(IndexError):
        build_B_hat(-1, beta_for(lattice, 1.0), grid)


def test_first_direction_product_matches_partial_quadratic_form(rng):
    # F_0 B_0 D W on one site equals the j = 0 part of the (2 - rho) collision
    f = PdfField(ONE_SITE, D1Q3, [0.66, 0.17, 0.16])
    df = augmented(f.data)
    beta = beta_for(D1Q3, 0.6)
    state = phi(df)
    for op in (build_W_hat(D1Q3, ONE_SITE), build_D_hat(df), build_B_hat(0, beta, ONE_SITE),
               build_F_hat(0, df, D1Q3, ONE_SITE)):
        state = op @ state
    only_j0 = beta.values.copy()
    only_j0[:, 1:, :] = 0.0
    oracle = classical.collide_quadratic(f, dataclasses.replace(beta, values=only_j0), "linear_2_minus_rho")
    np.testing.assert_allclose(blocks(state, 4)[0], augmented(oracle.data), rtol=1e-14)


def test_stream_matrix_is_permutation(lattice):
    for bc in (PERIODIC, BOUNCE_BACK):
        s = operators.stream_matrix(lattice, small_grid(lattice, 5, bc))
        assert (s @ s.T != sp.identity(s.shape[0])).nnz == 0
        assert set(s.data) == {1.0}


def test_stream_matrix_periodic_shift():
    s = operators.stream_matrix(D1Q3, Grid(5))
    cols = s.indices[s.indptr[:-1]]
    for x in range(5):
        assert cols[x + 5 * 1] == (x - 1) % 5 + 5 * 1
        assert cols[x + 5 * 2] == (x + 1) % 5 + 5 * 2


@pytest.mark.parametrize("lat_name,shape,bcs", [
    ("D1Q3", (4, 1), (BOUNCE_BACK, PERIODIC)),
    ("D2Q9", (4, 3), (BOUNCE_BACK, BOUNCE_BACK)),
    ("D2Q9", (3, 4), (PERIODIC, BOUNCE_BACK)),
    ("D2Q9", (4, 4), (PERIODIC, PERIODIC)),
])
def test_stream_matrix_matches_classical_on_basis_vectors(lat_name, shape, bcs):
    lat = make_lattice(lat_name)
    grid = Grid(*shape, bcs)
    dense = operators.stream_matrix(lat, grid).toarray()
    n_f = lat.n_e * grid.n_g
    for k in range(n_f):
        unit = np.zeros(n_f)
        unit[k] = 1.0
        np.testing.assert_array_equal(dense[:, k], classical.stream(PdfField(grid, lat, unit)).data)


def test_stream_hat_only_touches_first_block(lattice, rng):
    grid = small_grid(lattice, 3, BOUNCE_BACK)
    op = build_stream_matrix(lattice, grid)
    n_b = op.block_size
    v = rng.standard_normal(4 * n_b)
    out = op @ v
    np.testing.assert_array_equal(out[n_b:], v[n_b:])
    assert out[n_b - 1] == v[n_b - 1]
    assert np.linalg.norm(out) == pytest.approx(np.linalg.norm(v), rel=1e-15)


@pytest.mark.parametrize("name,count", [("D1Q3", 9), ("D2Q9", 21)])
def test_plan_length(name, count):
    lat = make_lattice(name)
    grid = Grid(2, 1 if lat.dims == 1 else 2)
    df = augmented(np.repeat(lat.w, grid.n_g))
    for variant in operators.VARIANTS:
        plan = build_plan(lat, grid, beta_for(lat, 0.8), df, variant)
        assert len(plan) == count == 2 * lat.n_e + 3
        labels = plan.labels
        assert labels[:2] == ["W_hat", "D_hat"] and labels[-1] == "S_hat"
        assert labels[2:-1:2] == [f"B_hat_{i}" for i in range(lat.n_e)]
        assert labels[3:-1:2] == [f"F_hat_{i}" for i in range(lat.n_e)]


@pytest.mark.parametrize("variant", ["layout_a", "layout_b"])
def test_block_occupancy_matches_structure(lattice, rng, variant):
    grid = small_grid(lattice, 3, BOUNCE_BACK)
    f = random_field(lattice, grid, rng)
    plan = build_plan(lattice, grid, beta_for(lattice, 0.7), augmented(f.data), variant)
    for op in plan:
        np.testing.assert_array_equal(op.block_occupancy(), op.occupancy, err_msg=op.label)
        assert op.shape == (4 * op.block_size, 4 * op.block_size)
        assert np.isfinite(op.matrix.data).all()
        coo = op.matrix.tocoo()
        assert len(set(zip(coo.row, coo.col))) == coo.nnz


def _collision_blocks(lattice, grid, f, variant, tau=0.7):
    df = augmented(f.data)
    plan = build_plan(lattice, grid, beta_for(lattice, tau), df, variant)
    v = phi(df)
    for op in plan.collision:
        v = op @ v
    return blocks(v, df.size)


@pytest.mark.parametrize("variant", ["layout_a", "layout_b"])
def test_constant_copies_hold_g(lattice, rng, variant):
    grid = small_grid(lattice, 3)
    f = random_field(lattice, grid, rng)
    df = augmented(f.data)
    g = build_D_hat(df).matrix @ (build_W_hat(lattice, grid) @ phi(df))
    g = blocks(g, df.size)[0]
    out = _collision_blocks(lattice, grid, f, variant)
    np.testing.assert_array_equal(out[3], g)
    constant = 2 if variant == "layout_a" else 1
    np.testing.assert_array_equal(out[constant], g)


def test_variants_agree(lattice, rng):
    grid = small_grid(lattice, 4)
    f = random_field(lattice, grid, rng)
    a = _collision_blocks(lattice, grid, f, "layout_a")[0]
    b = _collision_blocks(lattice, grid, f, "layout_b")[0]
    np.testing.assert_allclose(a, b, rtol=1e-14, atol=0)


@pytest.mark.parametrize("variant", ["layout_a", "layout_b"])
def test_collision_product_matches_classical(lattice, rng, variant):
    grid = small_grid(lattice, 4)
    f = random_field(lattice, grid, rng)
    got = _collision_blocks(lattice, grid, f, variant, 0.55)[0]
    oracle = classical.collide_quadratic(f, beta_for(lattice, 0.55), "linear_2_minus_rho")
    np.testing.assert_allclose(got, augmented(oracle.data), rtol=1e-12)


def test_unknown_variant():
    with pytest.raises(ValueError):
        build_B_hat(1, beta_for(D1Q3, 1.0), ONE_SITE, "layout_c")


def test_dense_guard():
    lat = make_lattice("D2Q9")
    op = build_W_hat(lat, Grid(32, 32))
    with pytest.raises(MemoryError):
        operators.to_dense(op)
    assert operators.to_dense(build_W_hat(D1Q3, ONE_SITE)).shape == (16, 16)


def test_dump_operator(tmp_path):
    op = build_W_hat(D1Q3, ONE_SITE)
    path = tmp_path / "w.csv"
    operators.dump_operator(op, path, "layout_a")
    lines = path.read_text().splitlines()
    assert lines[:3] == ["label,n_rows,n_cols,variant", "W_hat,16,16,layout_a", "row,col,value"]
    assert len(lines) == 3 + op.matrix.nnz
    assert lines[3] == "0,0,-1"
    assert lines[6] == "0,3,2"
