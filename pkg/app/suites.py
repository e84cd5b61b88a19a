"""Verification suites run by ``ybfock verify``.

Each suite returns CheckRecords; nothing here raises on a failed check.
"""
import logging

import numpy as np

from app.boolean_model import verify_boolrel
from app.config import settings
from app.errors import SizeCapError
from app.fock_engine import (
    build_fock,
    build_P,
    build_P_sector,
    build_R,
    build_R_sum,
    build_R_sector,
    bogoliubov_covariance_check,
    check_psquare,
    creator_norm_check,
    free_annihilator_factorization_check,
    hecke_factorial,
    level_rank_expectation,
    p_recursion_residual,
    pnorm_check,
    wick_residual,
    wick_sum_bound_check,
)
from app.linalg_core import hermitian_eig, identity, operator_norm
from app.reports import CheckRecord
from app.specialized_fock import (
    intertwining_residual,
    number_sum_residual,
    specialized_boolean_fock,
    specialized_monotone_fock,
)
from app.yb_catalog import (
    Kind,
    ModeWindow,
    build_standard,
    commutant_residual,
    reflection_conjugate,
    translation_covariance_residual,
    transposition,
    transpositions,
    verify_bounded_below,
    verify_braid,
    verify_hecke,
    verify_selfadjoint,
)

logger = logging.getLogger(__name__)

PSQUARE_TOL = 1e-8
PNORM_TOL = 1e-6

_COMMUTING = (Kind.FREE, Kind.BOSE, Kind.FERMI, Kind.BOOLEAN)
_CONTRACTIVE = (Kind.FREE, Kind.MONOTONE, Kind.ANTIMONOTONE, Kind.BOOLEAN)


def catalog_checks(kind: Kind, window: ModeWindow, tol: float) -> list[CheckRecord]:
    t = build_standard(kind, window)
    checks = [
        CheckRecord.residual("T selfadjoint", verify_selfadjoint(t), tol),
        CheckRecord.residual("braid T1T2T1 = T2T1T2", verify_braid(t), tol),
        CheckRecord.residual(f"Hecke q={t.hecke_q}", verify_hecke(t), tol),
        CheckRecord.residual("T >= -I", verify_bounded_below(t), tol),
    ]
    if window.d >= 2:
        checks.append(CheckRecord.residual("translation covariance", translation_covariance_residual(t), tol))
        if kind in _COMMUTING:
            worst = max(commutant_residual(t, u) for _, u in transpositions(window))
            checks.append(CheckRecord.residual("[T, U(x)U] = 0 for transpositions", worst, tol))
        else:
            lo = window.lo
            value = commutant_residual(t, transposition(window, lo, lo + 1))
            checks.append(CheckRecord.at_least(f"[T, U(x)U] for ({lo} {lo + 1})", value, 0.5, tol))
    if kind in (Kind.MONOTONE, Kind.ANTIMONOTONE):
        half = max(1, window.d // 2)
        sym = ModeWindow(-half, half)
        other = Kind.ANTIMONOTONE if kind is Kind.MONOTONE else Kind.MONOTONE
        reflected = reflection_conjugate(build_standard(kind, sym))
        value = operator_norm(reflected.matrix - build_standard(other, sym).matrix)
        checks.append(CheckRecord.residual(f"reflection gives {other.value} on {sym}", value, tol))
    return checks


def symmetrizer_checks(kind: Kind, window: ModeWindow, nmax: int, tol: float) -> list[CheckRecord]:
    t = build_standard(kind, window)
    checks = []
    for n in range(1, nmax + 1):
        if window.d ** n > settings.max_tensor_dim:
            logger.warning(f"skipping level {n}: {window.d}**{n} exceeds the size cap")
            break
        res = check_psquare(t, n)
        checks.append(CheckRecord.residual(f"(P^{n})^2 = {n}!_q P^{n}", res.idempotency, PSQUARE_TOL))
        checks.append(CheckRecord.residual(f"P^{n} selfadjoint", res.selfadjoint, PSQUARE_TOL))
        checks.append(CheckRecord.residual(f"P^{n} >= 0", res.positivity, PSQUARE_TOL))
        norm, expected = pnorm_check(t, n)
        checks.append(CheckRecord.equals(f"||P^{n}|| = {expected:g}", norm, expected, PNORM_TOL))
        checks.append(CheckRecord.residual(f"P^{n} recursion forms agree", p_recursion_residual(t, n), PSQUARE_TOL))
        checks.append(
            CheckRecord.residual(f"R^{n} recursion = explicit sum", operator_norm(build_R(t, n) - build_R_sum(t, n)), tol)
        )
        p = build_P(t, n)
        r_n = hermitian_eig(p, settings.kernel_tolerance).rank if np.any(p) else 0
        checks.append(
            CheckRecord.equals(f"rank level {n}", r_n, level_rank_expectation(kind, window.d, n), 0.0)
        )
        if kind in (Kind.MONOTONE, Kind.ANTIMONOTONE):
            values = hermitian_eig(build_R(t, n), PSQUARE_TOL).eigenvalues
            checks.append(CheckRecord.at_least(f"R^{n} >= 0", float(values[-1]), 0.0, tol))
            checks.append(CheckRecord.inequality(f"R^{n} <= I", float(values[0]), 1.0, tol))
    if kind is Kind.BOOLEAN:
        p2 = build_P(t, 2)
        checks.append(CheckRecord.residual("P^(2)=0", operator_norm(p2), tol))
    checks.extend(sector_checks(kind, nmax))
    return checks


def sector_checks(kind: Kind, nmax: int) -> list[CheckRecord]:
    """Witnesses on n distinct modes, where full windows may be too small."""
    checks = []
    n = max(nmax, 1)
    modes = tuple(range(n))
    t = build_standard(kind, ModeWindow(0, max(n - 1, 1)))
    norm = operator_norm(build_P_sector(t, modes))
    expected = 0.0 if kind is Kind.BOOLEAN and n >= 2 else float(hecke_factorial(t.hecke_q, n))
    checks.append(CheckRecord.equals(f"||P^{n}|| = {expected:g} on {n} distinct modes", norm, expected, PNORM_TOL))
    if kind is Kind.FERMI:
        for m in range(1, min(n, 4) + 1):
            tm = build_standard(kind, ModeWindow(0, m))
            value = operator_norm(build_R_sector(tm, tuple(range(m + 1))))
            checks.append(CheckRecord.at_least(f"||R^{m + 1}|| >= {m + 1}", value, m + 1, PNORM_TOL))
    return checks


def fock_checks(kind: Kind, window: ModeWindow, nmax: int, tol: float, seed: int) -> list[CheckRecord]:
    rng = np.random.default_rng(seed)
    t = build_standard(kind, window)
    try:
        fock = build_fock(t, nmax)
    except SizeCapError as exc:
        logger.warning(f"Fock checks skipped: {exc}")
        return []
    checks = []
    if kind in _CONTRACTIVE:
        checks.append(CheckRecord.inequality("M_T estimate <= 1", fock.m_t_estimate, 1.0, tol))
    for mode in window.modes:
        f = window.basis_vector(mode)
        vac = float(np.linalg.norm(fock.annihilator(mode) @ fock.vacuum()))
        checks.append(CheckRecord.residual(f"a({mode}) Omega = 0", vac, tol))
        for n in range(nmax):
            bc = creator_norm_check(fock, f, n)
            checks.append(CheckRecord.inequality(f"||a+({mode})|| on level {n}", bc.lhs, bc.bound, bc.tolerance))
        for n in range(1, nmax + 1):
            checks.append(
                CheckRecord.residual(
                    f"a({mode}) = l R^({n}) on level {n}",
                    free_annihilator_factorization_check(fock, f, n),
                    tol,
                )
            )
    worst = max(wick_residual(fock, i, j) for i in window.modes for j in window.modes)
    checks.append(CheckRecord.residual("Wick relation, all i,j", worst, tol))
    for n in range(1, nmax + 1):
        r = fock.level_dims[n]
        if not r:
            continue
        xi = rng.standard_normal(r) + 1j * rng.standard_normal(r)
        bc = wick_sum_bound_check(fock, window.lo, window.hi, xi, n)
        checks.append(CheckRecord.inequality(f"Wick sum bound on level {n}", bc.lhs, bc.bound, bc.tolerance))
    checks.append(
        CheckRecord.residual("Bogoliubov U = I", bogoliubov_covariance_check(fock, identity(window.d)), tol)
    )
    for (a, b), u in transpositions(window):
        if commutant_residual(t, u) <= tol:
            checks.append(
                CheckRecord.residual(f"Bogoliubov ({a} {b})", bogoliubov_covariance_check(fock, u), tol)
            )
    if kind is Kind.MONOTONE:
        model = specialized_monotone_fock(window, nmax)
        checks.append(CheckRecord.residual("explicit monotone model = Gram model", intertwining_residual(model, fock), tol))
        checks.append(CheckRecord.residual("sum a+_k a_k = I - P_Omega", number_sum_residual(model), tol))
    if kind is Kind.BOOLEAN:
        model = specialized_boolean_fock(window)
        checks.append(CheckRecord.residual("explicit Boolean model = Gram model", intertwining_residual(model, fock), tol))
        checks.append(CheckRecord.residual("Boolean relations", verify_boolrel(window).worst, 1e-12))
    return checks


def run_suite(kind: str | Kind, window: ModeWindow, nmax: int, tol: float, seed: int) -> list[CheckRecord]:
    kind = Kind.parse(kind)
    logger.info(f"verify {kind.value} on {window}, nmax={nmax}")
    checks = catalog_checks(kind, window, tol)
    checks += symmetrizer_checks(kind, window, nmax, tol)
    checks += fock_checks(kind, window, nmax, tol, seed)
    for check in checks:
        if not check.passed:
            logger.warning(f"{kind.value}: check failed: {check.name} value={check.value:.3e}")
    return checks
