"""
Per-quad comparison of the quantum and stochastic-field correlators.

After subtracting its g = 0 baseline, the SF correlated term equals the
QT coherent term at P_SF = ½. The uncorrelated term does not reduce to
the incoherent one: the subtraction leaves the cross term
(|g_a|² + |g_b|²)/2 · [D(ω_a−ω_d)D(ω_b−ω_c) + D(ω_a−ω_c)D(ω_b−ω_d)].
This module computes that residual analytically, measures it from the
two engines and reports the agreement quad by quad.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from src.physics.correlators import (
    Corr4Model,
    Corr4Tensor,
    MeanWeight,
    ProbeQuads,
    Provenance,
)
from src.physics.gain import GainProfile
from src.physics.gate import GateKernel
from src.physics.qt_engine import corr4_qt
from src.physics.sf_engine import (
    DEFAULT_P_SF,
    PairingCorr4,
    corr4_sf_closed,
    renormalize,
)

logger = logging.getLogger(__name__)

IDENTITY_TOLERANCE = 1e-12
MC_SIGMA = 5.0
HIGH_GAIN_SLACK = 1e-6


def identity_residual_model(gain: GainProfile, kernel: GateKernel) -> Corr4Model:
    """The cross term left by renormalization at P_SF = ½, ξ = 1, as a correlator model."""
    return Corr4Model(
        kernel=kernel,
        coherent_amplitude=np.zeros(gain.lattice.n_points, dtype=complex),
        pair_weight=MeanWeight(gain.g_intensity),
        exchange=1.0,
        provenance=Provenance.IDENTITY_RESIDUAL,
    )


def expected_identity_residual(
    gain: GainProfile,
    kernel: GateKernel,
    quads: ProbeQuads,
    p_sf: float = DEFAULT_P_SF,
    xi: int = 1,
) -> np.ndarray:
    """
    Analytic renormalized-uncorrelated minus incoherent value per quad.

    4P²[|g_a|²|g_b|² + (|g_a|²+|g_b|²)/2]·S − |g_a|²|g_b|²·S_ξ with
    S = D(a−d)D(b−c) + D(a−c)D(b−d) and S_ξ its ξ-weighted counterpart.
    Reduces to (|g_a|²+|g_b|²)/2·S at P_SF = ½, ξ = 1.
    """
    w = gain.g_intensity
    a, b, c, d = quads.a, quads.b, quads.c, quads.d
    first = kernel.between(a, d) * kernel.between(b, c)
    second = kernel.between(a, c) * kernel.between(b, d)
    product = w[a] * w[b]
    mean = 0.5 * (w[a] + w[b])
    return 4.0 * p_sf**2 * (product + mean) * (first + second) - product * (first + xi * second)


@dataclass
class QuadRecord:
    """One row of the identity report."""

    family: str
    a: int
    b: int
    c: int
    d: int
    qt: complex
    qt_coherent: complex
    qt_incoherent: complex
    sf_closed: complex
    sf_correlated: complex
    sf_uncorrelated: complex
    sf_renormalized: complex
    residual: complex
    residual_expected: complex
    coherent_error: float
    residual_error: float
    mc: complex | None = None
    mc_stderr: float | None = None
    mc_reference: complex | None = None
    mc_sigma: float | None = None
    passed: bool = True

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        for key, value in asdict(self).items():
            if isinstance(value, complex):
                out[key] = {"re": value.real, "im": value.imag}
            else:
                out[key] = value
        return out


@dataclass
class IdentityReport:
    records: list[QuadRecord] = field(default_factory=list)
    tolerance: float = IDENTITY_TOLERANCE
    sigma: float = MC_SIGMA

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def residual_vanishes(self) -> bool:
        """True only if the cross term is zero on every quad (the letter of the identity claim)."""
        return all(abs(r.residual) <= self.tolerance * max(abs(r.qt), 1e-300) for r in self.records)

    def summary(self) -> dict[str, Any]:
        return {
            "n_quads": len(self.records),
            "passed": self.passed,
            "max_coherent_error": max((r.coherent_error for r in self.records), default=0.0),
            "max_residual_error": max((r.residual_error for r in self.records), default=0.0),
            "max_mc_sigma": max(
                (r.mc_sigma for r in self.records if r.mc_sigma is not None), default=None
            ),
            "residual_vanishes": self.residual_vanishes,
        }


def _relative(diff: np.ndarray, *scales: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(np.stack(scales)), axis=0)
    return np.where(scale > 0, np.abs(diff) / np.where(scale > 0, scale, 1.0), np.abs(diff))


def identity_report(
    gain: GainProfile,
    kernel: GateKernel,
    quads: ProbeQuads,
    p_sf: float = DEFAULT_P_SF,
    xi: int = 1,
    mc_renormalized: Corr4Tensor | None = None,
    tolerance: float = IDENTITY_TOLERANCE,
    sigma: float = MC_SIGMA,
) -> IdentityReport:
    """
    Compare QT and renormalized SF correlators on every quad.

    A quad passes when the correlated/coherent terms agree and the
    measured residual equals the analytic one, both to `tolerance`
    relative to the operands, and, if a renormalized Monte Carlo tensor
    is supplied, when it lies within `sigma` standard errors of the exact
    moment-theorem value on the lattice.
    """
    qt = corr4_qt(gain, kernel, quads, xi)
    sf = corr4_sf_closed(gain, kernel, quads, p_sf)
    sf0 = corr4_sf_closed(gain.baseline(), kernel, quads, p_sf)
    sf_renorm = renormalize(sf, sf0)

    coherent = qt.term("coherent")
    correlated = sf_renorm.term("correlated")
    incoherent = qt.term("incoherent")
    uncorrelated = sf_renorm.term("uncorrelated")

    residual = uncorrelated - incoherent
    expected = expected_identity_residual(gain, kernel, quads, p_sf, xi)
    coherent_error = _relative(correlated - coherent, correlated, coherent)
    residual_error = _relative(
        residual - expected, sf.term("uncorrelated"), incoherent, expected
    )

    mc_reference = mc_sigma = None
    if mc_renormalized is not None:
        exact = PairingCorr4(gain, kernel, p_sf, overlap="lattice").evaluate(quads)
        exact0 = PairingCorr4(gain.baseline(), kernel, p_sf, overlap="lattice").evaluate(quads)
        mc_reference = exact.values - exact0.values
        stderr = mc_renormalized.stderr
        deviation = np.abs(mc_renormalized.values - mc_reference)
        mc_sigma = np.where(stderr > 0, deviation / np.where(stderr > 0, stderr, 1.0), np.inf)
        mc_sigma = np.where(deviation == 0, 0.0, mc_sigma)

    report = IdentityReport(tolerance=tolerance, sigma=sigma)
    for i in range(len(quads)):
        ok = coherent_error[i] <= tolerance and residual_error[i] <= tolerance
        record = QuadRecord(
            family=quads.family,
            a=int(quads.a[i]),
            b=int(quads.b[i]),
            c=int(quads.c[i]),
            d=int(quads.d[i]),
            qt=complex(qt.values[i]),
            qt_coherent=complex(coherent[i]),
            qt_incoherent=complex(incoherent[i]),
            sf_closed=complex(sf.values[i]),
            sf_correlated=complex(sf.term("correlated")[i]),
            sf_uncorrelated=complex(sf.term("uncorrelated")[i]),
            sf_renormalized=complex(sf_renorm.values[i]),
            residual=complex(residual[i]),
            residual_expected=complex(expected[i]),
            coherent_error=float(coherent_error[i]),
            residual_error=float(residual_error[i]),
        )
        if mc_renormalized is not None and mc_reference is not None and mc_sigma is not None:
            record.mc = complex(mc_renormalized.values[i])
            record.mc_stderr = float(mc_renormalized.stderr[i])
            record.mc_reference = complex(mc_reference[i])
            record.mc_sigma = float(mc_sigma[i])
            ok = ok and record.mc_sigma <= sigma
        record.passed = bool(ok)
        report.records.append(record)

    failed = sum(not r.passed for r in report.records)
    if failed:
        logger.warning(f"identity report ({quads.family}): {failed}/{len(quads)} quads FAIL")
    return report


@dataclass
class HighGainCheck:
    relative_deviation: np.ndarray
    bound: float

    @property
    def passed(self) -> bool:
        return bool(np.all(self.relative_deviation <= self.bound))


def high_gain_agreement(
    gain: GainProfile,
    kernel: GateKernel,
    quads: ProbeQuads,
    p_sf: float = DEFAULT_P_SF,
) -> HighGainCheck:
    """Un-renormalized |C_SF − C_QT|/|C_QT| against 2/|g(ω₀)|² + 10⁻⁶."""
    qt = corr4_qt(gain, kernel, quads, xi=1).values
    sf = corr4_sf_closed(gain, kernel, quads, p_sf).values
    g0 = gain.g_intensity[gain.lattice.center]
    bound = 2.0 / g0 + HIGH_GAIN_SLACK if g0 > 0 else float("inf")
    return HighGainCheck(relative_deviation=np.abs(sf - qt) / np.abs(qt), bound=bound)


__all__ = [
    "IDENTITY_TOLERANCE",
    "MC_SIGMA",
    "HighGainCheck",
    "IdentityReport",
    "QuadRecord",
    "expected_identity_residual",
    "high_gain_agreement",
    "identity_report",
    "identity_residual_model",
]
