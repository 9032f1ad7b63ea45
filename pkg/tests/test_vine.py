import numpy as np
import pytest
from pytest import approx

from pceuq.benchmarks.ishigami import ISHIGAMI_VINE
from pceuq.benchmarks.truss import TRUSS_LOAD_VINE
from pceuq.copula import (
    CvineModel,
    Family,
    PairCopula,
    RvineSpec,
    fit_cvine,
    fit_dvine,
    fit_pair,
    inverse_rosenblatt,
    rosenblatt,
    select_cvine_order,
    select_dvine_order,
    tau_matrix,
)
from pceuq.copula.families import INDEPENDENCE
from pceuq.errors import FitFailure, InputError

GUMBEL_VINE = CvineModel(
    (2, 0, 1, 3),
    (
        (PairCopula("gumbel", 0, (2.0,)), PairCopula("clayton", 90, (1.5,)), PairCopula("frank", 0, (4.0,))),
        (PairCopula("gaussian", 0, (0.4,)), PairCopula("gumbel", 180, (1.5,))),
        (PairCopula("student_t", 0, (-0.3, 5.0)),),
    ),
)


def test_structure_validation():
    with pytest.raises(InputError):
        CvineModel((0, 0, 1), ((INDEPENDENCE, INDEPENDENCE), (INDEPENDENCE,)))
    with pytest.raises(InputError):
        CvineModel((0, 1, 2), ((INDEPENDENCE,), (INDEPENDENCE,)))


@pytest.mark.parametrize("vine", [ISHIGAMI_VINE, TRUSS_LOAD_VINE], ids=["ishigami", "truss"])
def test_rosenblatt_round_trip(vine, rng):
    u = rng.random((1000, vine.d))
    z = rosenblatt(vine, u)
    assert inverse_rosenblatt(vine, z) == approx(u, abs=1e-8)
    assert vine.rosenblatt(vine.inverse_rosenblatt(u)) == approx(u, abs=1e-8)


def test_rosenblatt_round_trip_strong_tails(rng):
    # with strong tail dependence some conditionals sit within 1e-12 of 1, so
    # u -> z -> u is limited by float64 resolution of z; z -> u -> z is not
    z = rng.random((1000, 4))
    assert GUMBEL_VINE.rosenblatt(GUMBEL_VINE.inverse_rosenblatt(z)) == approx(z, abs=1e-8)
    u = rng.random((1000, 4))
    zu = GUMBEL_VINE.rosenblatt(u)
    assert GUMBEL_VINE.rosenblatt(GUMBEL_VINE.inverse_rosenblatt(zu)) == approx(zu, abs=1e-8)
    assert GUMBEL_VINE.inverse_rosenblatt(zu) == approx(u, abs=1e-6)


def test_rosenblatt_first_variable_is_identity(rng):
    u = rng.random((50, 4))
    assert rosenblatt(GUMBEL_VINE, u)[:, 2] == approx(u[:, 2])


def test_rosenblatt_whitens_vine_samples(rng):
    z = GUMBEL_VINE.rosenblatt(GUMBEL_VINE.sample(100_000, rng))
    T = tau_matrix(z)
    assert np.abs(T - np.eye(4)).max() < 0.01


def test_density_matches_sample_histogram(rng):
    # E_uniform[c(U)] = 1 for any copula density
    c = np.exp(GUMBEL_VINE.logpdf(rng.random((200_000, 4))))
    assert c.mean() == approx(1.0, abs=0.05)


def test_logpdf_matches_pair_factorisation(rng):
    vine = CvineModel((0, 1), ((PairCopula("clayton", 0, (3.0,)),),))
    u = rng.random((20, 2))
    assert vine.logpdf(u) == approx(PairCopula("clayton", 0, (3.0,)).logpdf(u[:, 0], u[:, 1]))


def test_select_order_two_variables(rng):
    assert select_cvine_order(rng.random((200, 2))) == (0, 1)


def test_select_order_ishigami_root(rng):
    u = ISHIGAMI_VINE.sample(3000, rng)
    assert select_cvine_order(u)[0] == 0


def test_fit_two_variables_equals_pair_fit(rng):
    u = PairCopula("frank", 0, (6.0,)).sample(800, rng)
    vine = fit_cvine(u)
    assert vine.pairs[0][0] == fit_pair(u).copula


def test_fit_truss_vine_taus():
    u = TRUSS_LOAD_VINE.sample(5000, np.random.default_rng(3))
    vine = fit_cvine(u)
    for pc in vine.pairs[0]:
        assert pc.tau() == approx(1 - 1 / 1.1, abs=0.05)


def test_fit_independent_data(rng):
    u = rng.random((1000, 3))
    vine = fit_cvine(u)
    assert all(abs(pc.tau()) < 0.05 for row in vine.pairs for pc in row)
    assert abs(vine.loglik(u)) < 10


def test_fit_recovers_ishigami_vine():
    u = ISHIGAMI_VINE.sample(3000, np.random.default_rng(11))
    vine = fit_cvine(u)
    assert vine.order[0] == 0
    assert vine.pair(0, 1).tau() == approx(0.5, abs=0.05)
    assert vine.pair(0, 2).tau() == approx(1 / 3, abs=0.05)
    assert abs(vine.pairs[1][0].tau()) < 0.05


def test_fit_preconditions(rng):
    with pytest.raises(FitFailure):
        fit_cvine(rng.random((5, 3)))
    with pytest.raises(InputError):
        fit_cvine(rng.random((50, 1)))


def test_serialisation(rng):
    back = CvineModel.from_dict(GUMBEL_VINE.to_dict())
    u = rng.random((10, 4))
    assert back.order == GUMBEL_VINE.order
    assert np.array_equal(back.logpdf(u), GUMBEL_VINE.logpdf(u))
    assert len(GUMBEL_VINE.summary()) == 6


def test_independence_vine_is_identity(rng):
    u = rng.random((20, 3))
    v = CvineModel.independence(3)
    assert v.rosenblatt(u) == approx(u) and v.logpdf(u) == approx(0.0)


# ---------------------------------------------------------------- R-vines

def test_rvine_from_cvine_agrees(rng):
    r = RvineSpec.from_cvine(GUMBEL_VINE)
    u = rng.random((500, 4))
    assert r.logpdf(u) == approx(GUMBEL_VINE.logpdf(u), abs=1e-10)


def test_dvine_round_trip_and_density(rng):
    pcs = [PairCopula("gumbel", 0, (1.8,)), PairCopula("clayton", 0, (1.0,)), PairCopula("frank", 0, (-3.0,))]
    pairs = (tuple(pcs), (PairCopula("gaussian", 0, (0.3,)), PairCopula("gumbel", 90, (1.4,))), (INDEPENDENCE,))
    dv = RvineSpec.from_dvine((1, 3, 0, 2), pairs)
    u = rng.random((1000, 4))
    assert dv.inverse_rosenblatt(dv.rosenblatt(u)) == approx(u, abs=1e-8)
    assert np.exp(dv.logpdf(rng.random((200_000, 4)))).mean() == approx(1.0, abs=0.05)
    z = dv.rosenblatt(dv.sample(50_000, rng))
    assert np.abs(tau_matrix(z) - np.eye(4)).max() < 0.015


def test_rvine_rejects_broken_proximity():
    e = lambda j, k, g: __import__("pceuq").copula.VineEdge(j, k, frozenset(g), INDEPENDENCE)
    with pytest.raises(InputError):
        RvineSpec(4, ((e(0, 1, ()), e(1, 2, ()), e(2, 3, ())), (e(0, 3, (1,)), e(1, 3, (2,))), (e(0, 3, (1, 2)),)))


def test_dvine_order_brute_force_is_optimal(rng):
    # chain 2 - 0 - 3 - 1 with strong neighbour dependence
    path = CvineModel.independence(4)
    gum = PairCopula("gumbel", 0, (3.0,))
    dv = RvineSpec.from_dvine((2, 0, 3, 1), ((gum, gum, gum), (INDEPENDENCE, INDEPENDENCE), (INDEPENDENCE,)))
    order = select_dvine_order(dv.sample(2000, rng))
    assert order in [(2, 0, 3, 1), (1, 3, 0, 2)]
    fitted = fit_dvine(dv.sample(1000, rng))
    assert all(e.copula.tau() > 0.5 for e in fitted.trees[0])
