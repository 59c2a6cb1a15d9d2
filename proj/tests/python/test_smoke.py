import json
import math

import numpy as np
import pytest

import atomgraph as ag


def test_closed_forms():
    assert ag.beta_k(3, 1) == pytest.approx(1.5)
    assert math.isinf(ag.beta_k(2, 2))
    assert ag.powerlaw_norm(1, 1, 3) == pytest.approx(33)
    assert ag.powerlaw_c2(0, 1, 3) == pytest.approx(1 / 28)
    assert ag.twoblock_a(2, 0.2) == pytest.approx(-0.72 / 1.72)
    C, positive = ag.solve_C(0.1, 0, 3)
    assert C == 0 and not positive


def test_family_and_theory():
    f = ag.builtin_family("constant", {"c2": 1.0, "c3": 0.5})
    assert f.atoms == 2 and f.types == 1
    assert f.edge_density() == pytest.approx(2.5)
    assert f.t_tilde("K3") == pytest.approx(0.5)
    tri = ag.builtin_family("constant", {"c3": 1 / 3})
    rho, rho_x = ag.survival(tri)
    assert rho == pytest.approx(1 - math.exp(-(2 * rho - rho * rho)), rel=1e-8)
    assert rho_x.shape == (1,)
    assert ag.percolation_threshold(tri) == pytest.approx(0.4030, abs=1e-3)
    pl = ag.powerlaw_family(1, 1, 3, nodes=1024)
    assert ag.operator_norm(pl) == pytest.approx(33, rel=5e-3)


def test_generate_and_stats():
    f = ag.builtin_family("constant", {"c2": 1.0, "c3": 0.5})
    g = ag.generate(f, 20000, seed=4)
    assert g["edges"].shape[1] == 2
    assert g["edges"].shape[0] / 20000 == pytest.approx(2.5, abs=0.1)
    again = ag.generate(f, 20000, seed=4)
    assert np.array_equal(g["edges"], again["edges"])
    s = ag.graph_stats(g["edges"], g["n"])
    assert s["e"] == g["edges"].shape[0]
    assert 0 < s["c2"] < 1
    assert s["C1"] > 0.5 * g["n"]


def test_errors_and_cli():
    with pytest.raises(ag.AtomgraphError):
        ag.powerlaw_family(1, 0, 1.0)
    with pytest.raises(ValueError):
        ag.graph_stats(np.array([[0, 5]]), 2)
    code, out, err = ag.run_cli(["norm", "--model", "constant", "--c3", "0.16666666666666666"])
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(1.0)
    code, out, err = ag.run_cli(["gen", "--model", "powerlaw", "--A", "1", "--alpha", "1", "--n", "5", "--out", "x"])
    assert code == 2 and "alpha" in err


def test_toml_family():
    f = ag.family_from_toml('[space]\nkind = "finite"\nweights = [0.5, 0.5]\n[[atom]]\nshape = "K2"\nkernel = "table(2, 0, 1, 1, 0)"\n')
    assert f.types == 2
    assert f.edge_density() == pytest.approx(0.5)
