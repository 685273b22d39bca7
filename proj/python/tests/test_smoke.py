import math

import pytest

import eemax


def test_problems():
    assert set(eemax.builtin_problem_names()) == {"paper-sect4", "manufactured", "zero"}
    p = eemax.builtin_problem("paper-sect4")
    assert p.validate() is None
    assert p.reaction(0.5) == pytest.approx(8.5)
    custom = eemax.problem_from_dict({"problem": "manufactured", "horizon": 0.5})
    assert custom.horizon == 0.5 and custom.has_exact
    with pytest.raises(ValueError):
        eemax.builtin_problem("missing")


def test_solve_and_estimate():
    p = eemax.builtin_problem("paper-sect4")
    mesh = eemax.Mesh.uniform(-1.0, 1.0, 32)
    grid = eemax.TimeGrid.uniform(1.0, 16)
    traj = eemax.solve(p, mesh, grid)
    assert len(traj.u) == 17 and len(traj.w) == 33
    b = eemax.estimate(p, grid, traj)
    assert b.split == 15
    assert b.total == pytest.approx(b.recompute_total(), rel=1e-14)
    parts = b.init_term + b.F_term + b.eta_ell_MK + b.dpsi_term + b.zh_term
    assert parts == pytest.approx(b.total, rel=1e-12)
    assert math.isinf(b.weights.mu[-1])


def test_reference_and_error():
    p = eemax.builtin_problem("manufactured")
    ref = eemax.solve_reference(p, elements=256, sample_elements=1024)
    assert ref.accuracy <= 1e-9
    x = ref.nodes[300]
    assert ref.values[300] == pytest.approx(p.exact(x, 1.0), abs=1e-9)
    traj = eemax.solve(p, eemax.Mesh.uniform(-1.0, 1.0, 32), eemax.TimeGrid.uniform(1.0, 16))
    assert 1e-5 < eemax.error_at_T(traj.final, ref) < 1e-3


def test_run_matrix(tmp_path):
    cfg = eemax.RunConfig()
    cfg.m_values = [16, 32]
    records = eemax.run_matrix(cfg)
    assert [r.M for r in records] == [16, 32]
    assert records[0].p_M is None and records[1].p_M > 1.8
    assert all(r.ok and r.eta >= r.e_M for r in records)
    files = eemax.emit_tables(records, str(tmp_path))
    text = open(files["table1_csv"]).read()
    assert text.splitlines()[0] == "M,e_M,p_M,eta_eE,chi_M"
    assert text == eemax.table1_csv(records)
