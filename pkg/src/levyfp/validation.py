"""Statistical validation battery shared by the test suite and the CLI.

Each check runs a named experiment at a given sample size and returns a
:class:`CheckResult`; the defaults reproduce the full battery at its pinned
sizes and significance levels.  Sizes scale down for quick smoke runs, the
thresholds never do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, gammaincc
from scipy.stats import chi2

from .engine import sample_id, sample_interval_exit, sample_level_crossing, sample_subordinator_fpe
from .gamma_carrier import GammaCarrier
from .mixture_carrier import MixtureCarrier
from .models import (
    ConstantBoundary,
    FiniteMeasure,
    LinearBoundary,
    TiltedTruncatedModel,
    boundary_shift,
    id_moments,
)
from .oracle import (
    TruncationScheme,
    ks_one_sample,
    ks_two_sample,
    moment_check,
    oracle_fpe,
    oracle_interval_exit,
    oracle_level_crossing,
)
from .rng import RngStream
from .stable import sample_standard_stable, standard_intensity
from .stable_carrier import StableCarrier


@dataclass(frozen=True)
class CheckResult:
    name: str
    statistic: float
    p_value: float
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        p = "" if math.isnan(self.p_value) else f" p={self.p_value:.4g}"
        return f"{status} {self.name}: stat={self.statistic:.4g}{p} {self.detail}".rstrip()


_ALPHA = 0.01  # significance for every KS / chi-square gate
_Z_GATE = 3.0  # moment checks pass within 3 standard errors


def _std_stable_model(alpha=0.5, tilt=0.0, cutoff=math.inf, atoms=()):
    car = StableCarrier(alpha, standard_intensity(alpha))
    return TiltedTruncatedModel(car, tilt=tilt, cutoff=cutoff, finite_part=FiniteMeasure(atoms=atoms))


def check_stable_marginal(seed: int = 1, n: int = 100_000) -> CheckResult:
    """One-sample KS of the alpha=1/2 standard stable law against its closed form."""
    xs = sample_standard_stable(0.5, RngStream(seed, 0), size=n)
    stat, p = ks_one_sample(xs, lambda x: erfc(0.5 / math.sqrt(x)) if x > 0 else 0.0)
    return CheckResult("stable-marginal-law", stat, p, p > _ALPHA, f"n={n}")


def check_id_moments(seed: int = 2, n: int = 1_000_000) -> CheckResult:
    """Moments of the censored value at t=1 for the Gamma and stable carriers."""
    worst = 0.0
    details = []
    for label, model in (
        ("gamma", TiltedTruncatedModel(GammaCarrier(), cutoff=1.0)),
        ("stable", _std_stable_model(cutoff=1.0)),
    ):
        mean, var = id_moments(model, 1.0)
        stream = RngStream(seed, 0 if label == "gamma" else 1)
        vals = np.fromiter((sample_id(model, 1.0, stream) for _ in range(n)), float, count=n)
        z_mean, z_var = moment_check(vals, mean, var)
        worst = max(worst, abs(z_mean), abs(z_var))
        details.append(f"{label}: z_mean={z_mean:.2f} z_var={z_var:.2f}")
    return CheckResult(
        "id-moments", worst, float("nan"), worst < _Z_GATE, f"n={n}; " + "; ".join(details)
    )


def check_gamma_identity_fpt(seed: int = 3, n: int = 10_000) -> CheckResult:
    """Passage times of the identity Gamma embedding against the closed-form CDF."""
    model = TiltedTruncatedModel(GammaCarrier())
    ts = np.empty(n)
    for i in range(n):
        ev, _ = sample_subordinator_fpe(model, ConstantBoundary(1.0), math.inf, RngStream(seed, i))
        ts[i] = ev.T
    stat, p = ks_one_sample(ts, lambda t: float(gammaincc(t, 1.0)) if t > 0 else 0.0)
    return CheckResult("gamma-identity-fpt-law", stat, p, p > _ALPHA, f"n={n}")


def check_no_creep_at_levels(seed: int = 4, n: int = 100_000) -> CheckResult:
    """Constant boundaries are crossed by a jump: pooled runs, zero creep events."""
    runs = [
        (TiltedTruncatedModel(GammaCarrier()), n // 2),
        (_std_stable_model(), n - n // 2 - n // 10),
        (_std_stable_model(tilt=1.0, cutoff=1.0), n // 10),
    ]
    creeps = 0
    total = 0
    for k, (model, count) in enumerate(runs):
        for i in range(count):
            ev, _ = sample_subordinator_fpe(
                model, ConstantBoundary(1.0), math.inf, RngStream(seed + k, i)
            )
            total += 1
            if not ev.censored and ev.jump == 0.0:
                creeps += 1
    return CheckResult(
        "no-creep-at-constant-levels", float(creeps), float("nan"), creeps == 0, f"pooled n={total}"
    )


def check_creep_at_decreasing_boundary(seed: int = 5, n: int = 10_000) -> CheckResult:
    """A strictly decreasing boundary creeps with positive, seed-stable frequency."""
    model = _std_stable_model()
    boundary = LinearBoundary(1.0, -0.5)
    fracs = []
    misplaced = 0
    for k in range(2):
        creep = 0
        for i in range(n):
            ev, _ = sample_subordinator_fpe(model, boundary, 2.0, RngStream(seed + k, i))
            if ev.censored or ev.jump > 0.0:
                continue
            creep += 1
            if abs(ev.z_left - (1.0 - ev.T / 2.0)) > 1e-12:
                misplaced += 1
        fracs.append(creep / n)
    diff_se = math.sqrt(sum(f * (1 - f) / n for f in fracs))
    z = abs(fracs[0] - fracs[1]) / diff_se if diff_se > 0 else math.inf
    ok = fracs[0] > 0 and fracs[1] > 0 and misplaced == 0 and z < _Z_GATE
    return CheckResult(
        "creep-at-decreasing-boundary",
        z,
        float("nan"),
        ok,
        f"fractions {fracs[0]:.4f}/{fracs[1]:.4f}, off-boundary {misplaced}",
    )


def _criterion6_model():
    return _std_stable_model(alpha=0.5, tilt=1.0, cutoff=1.0, atoms=((0.4, 0.3),))


def check_oracle_agreement_fpe(seed: int = 6, n: int = 10_000, epsilon: float = 1e-4) -> CheckResult:
    """Exact Table-1 sampler vs the epsilon-truncation oracle on (T, Z(T))."""
    model = _criterion6_model()
    boundary = ConstantBoundary(1.0)
    t_exact = np.empty(n)
    z_exact = np.empty(n)
    for i in range(n):
        ev, _ = sample_subordinator_fpe(model, boundary, math.inf, RngStream(seed, i))
        t_exact[i], z_exact[i] = ev.T, ev.z_final
    scheme = TruncationScheme(epsilon)
    t_orc = np.empty(n)
    z_orc = np.empty(n)
    for i in range(n):
        ev = oracle_fpe(model, boundary, math.inf, scheme, RngStream(seed + 1, i))
        t_orc[i], z_orc[i] = ev.T, ev.z_final
    stat_t, p_t = ks_two_sample(t_exact, t_orc)
    stat_z, p_z = ks_two_sample(z_exact, z_orc)
    p = min(p_t, p_z)
    return CheckResult(
        "oracle-agreement-passage", max(stat_t, stat_z), p, p > _ALPHA,
        f"n={n} eps={epsilon} (p_T={p_t:.3f}, p_Z={p_z:.3f})",
    )


def _two_sided_models():
    plus = TiltedTruncatedModel(GammaCarrier(), cutoff=1.0)
    minus = _std_stable_model(alpha=0.5, tilt=1.0, cutoff=1.0)
    return plus, minus


def check_oracle_agreement_level(seed: int = 7, n: int = 10_000, epsilon: float = 1e-4) -> CheckResult:
    """Exact Table-2 sampler vs the oracle at a constant level."""
    plus, minus = _two_sided_models()
    level, horizon = 0.5, 5.0
    te = np.empty(n)
    ze = np.empty(n)
    for i in range(n):
        ev = sample_level_crossing(plus, minus, level, horizon, RngStream(seed, i))
        te[i], ze[i] = ev.T, ev.z_final
    scheme = TruncationScheme(epsilon)
    to = np.empty(n)
    zo = np.empty(n)
    for i in range(n):
        ev = oracle_level_crossing(plus, minus, level, horizon, scheme, RngStream(seed + 1, i))
        to[i], zo[i] = ev.T, ev.z_final
    stat_t, p_t = ks_two_sample(te, to)
    stat_z, p_z = ks_two_sample(ze, zo)
    p = min(p_t, p_z)
    return CheckResult(
        "oracle-agreement-level", max(stat_t, stat_z), p, p > _ALPHA,
        f"n={n} eps={epsilon} (p_T={p_t:.3f}, p_Z={p_z:.3f})",
    )


def check_oracle_agreement_interval(seed: int = 8, n: int = 10_000, epsilon: float = 1e-4) -> CheckResult:
    """Exact Table-3 sampler vs the oracle on interval exit, plus the support law."""
    plus, minus = _two_sided_models()
    a_minus = a_plus = 0.5
    horizon = 5.0
    te = np.empty(n)
    ze = np.empty(n)
    violations = 0
    for i in range(n):
        ev = sample_interval_exit(plus, minus, a_minus, a_plus, horizon, RngStream(seed, i))
        te[i], ze[i] = ev.T, ev.z_final
        if not ev.censored and -a_minus < ev.z_final < a_plus:
            violations += 1
    scheme = TruncationScheme(epsilon)
    to = np.empty(n)
    zo = np.empty(n)
    for i in range(n):
        ev = oracle_interval_exit(plus, minus, a_minus, a_plus, horizon, scheme, RngStream(seed + 1, i))
        to[i], zo[i] = ev.T, ev.z_final
    stat_t, p_t = ks_two_sample(te, to)
    stat_z, p_z = ks_two_sample(ze, zo)
    p = min(p_t, p_z)
    ok = p > _ALPHA and violations == 0
    return CheckResult(
        "oracle-agreement-interval", max(stat_t, stat_z), p, ok,
        f"n={n} eps={epsilon} (p_T={p_t:.3f}, p_Z={p_z:.3f}, inside-exits={violations})",
    )


def check_tilt_classification(seed: int = 9, n: int = 100_000) -> CheckResult:
    """Keep-rate of carrier jumps below the cutoff matches exp(-tilt * v) in bins."""
    model = _std_stable_model(alpha=0.5, tilt=1.0, cutoff=1.0)
    q, r = model.tilt, model.cutoff
    v_raw = []
    kept = []
    i = 0
    while len(v_raw) < n:
        _, trace = sample_subordinator_fpe(model, ConstantBoundary(1.0), math.inf, RngStream(seed, i))
        i += 1
        for rec in trace:
            if rec.branch == "cross" and 0.0 < rec.v_raw <= r:
                v_raw.append(rec.v_raw)
                kept.append(rec.v > 0.0)
    v_raw = np.array(v_raw[:n])
    kept = np.array(kept[:n])
    edges = np.quantile(v_raw, np.linspace(0, 1, 21))
    edges[0], edges[-1] = 0.0, r
    stat = 0.0
    bins = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mask = (v_raw > lo) & (v_raw <= hi)
        cnt = int(mask.sum())
        if cnt == 0:
            continue
        p_bin = float(np.exp(-q * v_raw[mask]).mean())
        obs = float(kept[mask].sum())
        stat += (obs - cnt * p_bin) ** 2 / (cnt * p_bin * (1 - p_bin))
        bins += 1
    p = float(chi2.sf(stat, bins))
    return CheckResult("tilt-classification", stat, p, p > _ALPHA, f"n={n} bins={bins}")


def check_renewal_property(seed: int = 10, n: int = 10_000) -> CheckResult:
    """Full runs vs runs resumed mid-way through a shifted boundary agree in law."""
    model = _std_stable_model(alpha=0.5, tilt=1.0, cutoff=0.6)
    boundary = LinearBoundary(1.0, -0.1)
    t_full = np.empty(n)
    for i in range(n):
        ev, _ = sample_subordinator_fpe(model, boundary, math.inf, RngStream(seed, i))
        t_full[i] = ev.T
    t_comp = np.empty(n)
    for i in range(n):
        ev, trace = sample_subordinator_fpe(model, boundary, math.inf, RngStream(seed + 1, i))
        if len(trace) < 2:
            t_comp[i] = ev.T
            continue
        first = trace[0]
        rest = boundary_shift(boundary, first.T, first.H)
        ev2, _ = sample_subordinator_fpe(model, rest, math.inf, RngStream(seed + 2, i))
        t_comp[i] = first.T + ev2.T
    stat, p = ks_two_sample(t_full, t_comp)
    return CheckResult("renewal-property", stat, p, p > _ALPHA, f"n={n}")


def check_mixture_single_consistency(seed: int = 11, n: int = 10_000) -> CheckResult:
    """One-component mixtures reproduce the single-stable crossing law."""
    alpha = 0.45
    gamma = 0.8 * standard_intensity(alpha)
    single = StableCarrier(alpha, gamma)
    mix = MixtureCarrier(((alpha, gamma),))
    w_single = gamma * 0.7 ** (1 - alpha) / (alpha * (1 - alpha))
    w_mix = mix.crossing_weights(0.7, 1.0)[1]
    weight_gap = abs(w_single - w_mix) / w_single
    s1, s2 = RngStream(seed, 0), RngStream(seed, 1)
    t, z, w0 = 0.8, 0.7, 0.25
    a = np.array([[d.s_left, d.jump] for d in (single.crossing(t, z, w0, s1) for _ in range(n))])
    b = np.array([[d.s_left, d.jump] for d in (mix.crossing(t, z, w0, s2) for _ in range(n))])
    creep_a, creep_b = (a[:, 1] == 0).mean(), (b[:, 1] == 0).mean()
    stat_s, p_s = ks_two_sample(a[a[:, 1] > 0, 0], b[b[:, 1] > 0, 0])
    stat_v, p_v = ks_two_sample(a[a[:, 1] > 0, 1], b[b[:, 1] > 0, 1])
    p = min(p_s, p_v)
    ok = p > _ALPHA and weight_gap < 1e-12
    return CheckResult(
        "mixture-single-consistency", max(stat_s, stat_v), p, ok,
        f"n={n} weight_gap={weight_gap:.2e} creep {creep_a:.4f}/{creep_b:.4f}",
    )


def check_gamma_branch_identity(grid: int = 200) -> CheckResult:
    """w1*h1*rho1 + w2*h2*rho2 is proportional to g_t(x) e^-v / v on its support."""
    from .gamma_carrier import accept_h1, accept_h2, crossing_weights, proposal_rho1, proposal_rho2

    t, z = 1.3, 0.7
    _, w1, w2 = crossing_weights(t, z, 0.0)
    xs = np.linspace(z / (grid + 1), z * (1 - 1e-9), grid)
    vs = np.linspace(1e-3, z + 3.0, grid)
    ratios = []
    for x in xs:
        for v in vs:
            if not 0.0 <= z - x < v:
                continue
            lhs = w1 * accept_h1(z, x, v) * proposal_rho1(t, z, x, v)
            lhs += w2 * accept_h2(z, x, v) * proposal_rho2(t, z, x, v)
            rhs = x ** (t - 1.0) * math.exp(-x) * math.exp(-v) / v
            ratios.append(lhs / rhs)
    ratios = np.array(ratios)
    const = np.median(ratios)
    dev = float(np.max(np.abs(ratios / const - 1.0)))
    return CheckResult(
        "gamma-branch-identity", dev, float("nan"), dev < 1e-8, f"grid={grid}x{grid}"
    )


def check_cli_determinism(seed: int = 12) -> CheckResult:
    """Byte-identical CLI output for identical config and seed."""
    import hashlib
    import json
    import tempfile
    from pathlib import Path

    from .cli import main

    config = {
        "mode": "sample-id",
        "model": {"carrier": {"kind": "gamma"}, "r": 1.0},
        "t": 1.0,
        "n": 200,
        "seed": seed,
    }
    digests = []
    with tempfile.TemporaryDirectory() as tmp:
        cfg = Path(tmp) / "job.json"
        cfg.write_text(json.dumps(config))
        for run in range(2):
            out = Path(tmp) / f"out{run}.csv"
            code = main(["sample", "--config", str(cfg), "--out", str(out)])
            assert code == 0
            digests.append(hashlib.sha256(out.read_bytes()).hexdigest())
    ok = digests[0] == digests[1]
    return CheckResult("cli-determinism", float(ok), float("nan"), ok, digests[0][:12])


FULL_BATTERY = (
    check_stable_marginal,
    check_id_moments,
    check_gamma_identity_fpt,
    check_no_creep_at_levels,
    check_creep_at_decreasing_boundary,
    check_oracle_agreement_fpe,
    check_oracle_agreement_level,
    check_oracle_agreement_interval,
    check_tilt_classification,
    check_renewal_property,
    check_mixture_single_consistency,
    check_gamma_branch_identity,
    check_cli_determinism,
)

_SIZED = {
    "check_stable_marginal",
    "check_id_moments",
    "check_gamma_identity_fpt",
    "check_no_creep_at_levels",
    "check_creep_at_decreasing_boundary",
    "check_oracle_agreement_fpe",
    "check_oracle_agreement_level",
    "check_oracle_agreement_interval",
    "check_tilt_classification",
    "check_renewal_property",
    "check_mixture_single_consistency",
}


def run_battery(names=None, size_scale: float = 1.0) -> list[CheckResult]:
    """Run the named checks (all by default), scaling sample sizes only."""
    results = []
    for fn in FULL_BATTERY:
        short = fn.__name__.removeprefix("check_").replace("_", "-")
        if names and short not in names:
            continue
        if size_scale != 1.0 and fn.__name__ in _SIZED:
            import inspect

            n_default = inspect.signature(fn).parameters["n"].default
            results.append(fn(n=max(200, int(n_default * size_scale))))
        else:
            results.append(fn())
    return results
