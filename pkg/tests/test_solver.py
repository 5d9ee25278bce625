import csv
import io
import json
import math

import numpy as np
import pytest

from qmultimeter.choimap import depolarizing_channel, mean_fidelity, random_choi
from qmultimeter.fidelity_operator import build_r_analytic, input_support, symmetric_projector
from qmultimeter.solver import SolverConfig, certify, closed_form_chi, log_to_csv, solve

F_ORTH = 0.5 * (1 + 1 / math.sqrt(3))


@pytest.fixture(scope="module")
def solved():
    out = {}
    for kind, n in [("identical", 1), ("identical", 2), ("identical", 3), ("orthogonal", 2)]:
        r = build_r_analytic(kind, n)
        out[(kind, n)] = (r, solve(r))
    return out


@pytest.mark.parametrize(
    "kind,n,expected",
    [("identical", 1, 0.75), ("identical", 2, 5 / 6), ("identical", 3, 7 / 8), ("orthogonal", 2, F_ORTH)],
)
def test_solve_reaches_optimum(solved, kind, n, expected):
    r, res = solved[(kind, n)]
    assert res.converged
    assert abs(res.certificate.fidelity - expected) <= 1e-6
    assert res.certificate.passed
    res.chi.check()


def test_solve_monotone(solved):
    for r, res in solved.values():
        fids = [rec.fidelity for rec in res.log]
        start = mean_fidelity(depolarizing_channel(r.dim_in, 2), r)
        steps = np.diff([start] + fids)
        assert steps.min() >= -1e-12


def test_solve_matches_closed_form_fidelity(solved):
    for (kind, n), (r, res) in solved.items():
        closed = closed_form_chi(kind, n)
        assert abs(res.certificate.fidelity - mean_fidelity(closed, r)) <= 1e-6
        assert certify(closed, r).passed


def test_solve_from_random_start():
    r = build_r_analytic("identical", 2)
    chi0 = random_choi(8, 2, np.random.default_rng(5))
    res = solve(r, chi0=chi0)
    assert res.converged and res.certificate.passed
    assert abs(res.certificate.fidelity - 5 / 6) <= 1e-6


def test_solve_non_convergence_flag():
    res = solve(build_r_analytic("identical", 1), SolverConfig(max_iters=1))
    assert not res.converged
    assert not res.certificate.passed
    assert res.iterations == 1


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(max_iters=0)
    with pytest.raises(ValueError):
        SolverConfig(convergence_tol=1e-16)
    with pytest.raises(ValueError):
        SolverConfig(psd_tol=0)


def expected_lambda(n):
    return input_support("identical", n) / (2 * (n + 1)) - symmetric_projector(n + 1) / (2 * (n + 1) * (n + 2))


@pytest.mark.parametrize("n", range(1, 6))
def test_certificate_of_closed_form(n):
    r = build_r_analytic("identical", n)
    cert = certify(closed_form_chi("identical", n), r)
    assert cert.passed
    assert cert.residual_eq10 <= 1e-9
    assert cert.min_eig_eq11 >= -1e-9
    assert np.max(np.abs(cert.lambda_op - expected_lambda(n))) <= 1e-9


def test_certificate_blocks_n2():
    r = build_r_analytic("identical", 2)
    cert = certify(closed_form_chi("identical", 2), r)
    a1, a2 = cert.blocks(r)
    sym = symmetric_projector(3)
    assert np.max(np.abs(a1 - sym / 12)) <= 1e-12
    assert np.max(np.abs(a2 - (input_support("identical", 2) - sym) / 6)) <= 1e-12
    assert np.linalg.eigvalsh(a1)[0] >= -1e-12
    assert np.linalg.eigvalsh(a2)[0] >= -1e-12


@pytest.mark.parametrize("n", range(1, 6))
def test_min_eig_consistent_with_blocks(n):
    # lam (x) 1 - R is block diagonal, so its spectrum is the union of A1's and A2's
    r = build_r_analytic("identical", n)
    cert = certify(closed_form_chi("identical", n), r)
    a1, a2 = cert.blocks(r)
    union_min = min(np.linalg.eigvalsh(a1)[0], np.linalg.eigvalsh(a2)[0])
    assert abs(cert.min_eig_eq11 - union_min) <= 1e-12
    nonzero = sorted({round(x, 9) for x in np.linalg.eigvalsh(a1) if x > 1e-9})
    assert nonzero == [round(n / (2 * (n + 1) * (n + 2)), 9)]


def test_certificate_fails_for_depolarizing():
    r = build_r_analytic("identical", 1)
    cert = certify(depolarizing_channel(4, 2), r)
    assert not cert.passed
    assert abs(cert.fidelity - 0.5) <= 1e-12
    assert cert.residual_eq10 > 1e-3


def test_closed_form_trace_preserving():
    for kind, n in [("identical", 1), ("identical", 4), ("orthogonal", 2)]:
        chi = closed_form_chi(kind, n)
        assert chi.tp_error() <= 1e-15
        chi.check()


def test_closed_form_orthogonal_fidelity():
    r = build_r_analytic("orthogonal", 2)
    assert abs(mean_fidelity(closed_form_chi("orthogonal", 2), r) - F_ORTH) <= 1e-12


def test_log_csv_and_certificate_json(solved):
    r, res = solved[("identical", 1)]
    rows = list(csv.reader(io.StringIO(log_to_csv(res.log))))
    assert rows[0] == ["iter", "fidelity", "step_norm", "min_eig"]
    assert len(rows) == res.iterations + 1
    assert float(rows[-1][1]) == res.log[-1].fidelity
    doc = json.loads(res.certificate.to_json())
    assert doc["passed"] is True
    assert {"residual_eq10", "min_eig_eq11", "fidelity"} <= doc.keys()


def test_solve_result_unpacks(solved):
    _, res = solved[("identical", 1)]
    chi, cert, log = res
    assert chi is res.chi and cert is res.certificate and log is res.log
