"""Command-line front end for the interference toolkit.

Subcommands
-----------
pdf        invert the characteristic function of one scenario to a density
fit        two-moment lognormal approximation of a scenario
simulate   Monte Carlo histogram and cumulant summary
coverage   covered-area ratios of the three control schemes
hidden     offset-receiver report (analytic measures + simulation)
reproduce  canned parameter studies (fig2, fig3a, ... fig8b)
validate   numeric self-checks at a chosen strictness profile

All artifacts are deterministic: rerunning a command with the same
arguments produces byte-identical files (no timestamps, fixed float
formatting, sorted JSON keys), and every file records the scenario
config hash and seed that produced it.  ``--threads`` is accepted for
interface stability and recorded in the outputs, but execution is
single-threaded so results never depend on scheduling.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np
import yaml

from . import analytic as an
from . import montecarlo as mc
from .channel import (
    CompositeChannelParams,
    composite_lognormal_moments,
    sample_gain,
)
from .control import ContentionConfig, HybridConfig, PowerControlConfig
from .errors import (
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_VALIDATION,
    ApplicabilityError,
    CRInterfError,
    ConfigurationError,
    DomainError,
    NumericError,
    ValidationFailure,
)
from .inversion import build_characteristic_grid, pdf_for_scenario, pdf_from_charfn
from .pointproc import (
    AnnulusRegion,
    interior_mask,
    matern_hardcore_thin,
    retaining_probability,
    sample_poisson_annulus,
)
from .scenario import ScenarioConfig

#: outer-truncation rule used for the simulated curves of the canned
#: studies; looser than the library default so a study finishes in
#: minutes on one core, at the cost of <~0.5% of the mean (recorded in
#: each manifest).
STUDY_TAIL_FRACTION = 5e-3
STUDY_TRIALS = 20_000


# ---------------------------------------------------------------------------
# deterministic writers
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17e")


def _write_csv(path: Path, meta: dict, columns, rows) -> None:
    lines = [f"# {key}={_fmt(val)}" for key, val in meta.items()]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=float) + "\n")


def _out_dir(args) -> Path:
    out = Path(args.out_dir) if args.out_dir else Path(".")
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# config loading
# ---------------------------------------------------------------------------


def _load_yaml(path_str: str) -> dict:
    """Parse a YAML file.  I/O failures propagate as OSError; malformed
    content maps to ConfigurationError.  Called before any output file is
    created so a bad config never leaves partial artifacts behind."""
    text = Path(path_str).read_text()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"malformed YAML in {path_str}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{path_str} must contain a mapping at top level")
    return raw


def _load_scenario(args) -> ScenarioConfig:
    if args.config is None:
        raise ConfigurationError("this subcommand requires --config")
    sc = ScenarioConfig.from_dict(_load_yaml(args.config))
    updates = {}
    if args.seed is not None:
        updates["seed"] = int(args.seed)
    if args.trials is not None:
        updates["trials"] = int(args.trials)
    return sc.with_updates(**updates) if updates else sc


def _ident(sc: ScenarioConfig) -> dict:
    return {"config_hash": sc.config_hash(), "seed": sc.seed, "scheme": sc.scheme}


# ---------------------------------------------------------------------------
# pdf / fit / simulate
# ---------------------------------------------------------------------------


def _cmd_pdf(args) -> int:
    sc = _load_scenario(args)
    est = pdf_for_scenario(sc)
    out = _out_dir(args)
    path = out / f"pdf_{sc.scheme}_{sc.config_hash()}.csv"
    meta = {**_ident(sc), "kind": est.kind, "mass": est.mass, "threads": args.threads}
    _write_csv(path, meta, ("y", "density"), zip(est.y, est.density))
    print(path)
    return EXIT_OK


def _fit_grid(fit: an.LogNormalFit, n: int = 800) -> np.ndarray:
    half_width = 4.0 * fit.sigma
    return np.exp(np.linspace(fit.mu - half_width, fit.mu + half_width, n))


def _cmd_fit(args) -> int:
    sc = _load_scenario(args)
    cs = an.closed_form_cumulants(sc)
    fit = an.lognormal_fit(cs.k1, cs.k2)
    out = _out_dir(args)
    stem = f"fit_{sc.scheme}_{sc.config_hash()}"
    payload = {
        **_ident(sc),
        "k1": cs.k1,
        "k2": cs.k2,
        "cumulant_source": cs.source,
        "mu": fit.mu,
        "sigma2": fit.sigma2,
        "fitted_mean": fit.mean,
        "fitted_variance": fit.variance,
        "threads": args.threads,
    }
    _write_json(out / f"{stem}.json", payload)
    y = _fit_grid(fit)
    _write_csv(
        out / f"{stem}.csv",
        {**_ident(sc), "kind": "lognormal_fit", "mu": fit.mu, "sigma2": fit.sigma2},
        ("y", "density"),
        zip(y, fit.pdf(y)),
    )
    print(out / f"{stem}.json")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    sc = _load_scenario(args)
    emp = mc.simulate_aggregate(sc, keep_samples=False)
    out = _out_dir(args)
    stem = f"sim_{sc.scheme}_{sc.config_hash()}"
    _write_csv(
        out / f"{stem}.csv",
        {**_ident(sc), "trials": emp.trials, "zero_mass": emp.zero_mass},
        ("bin_left", "bin_right", "density"),
        emp.histogram_rows(),
    )
    _write_json(out / f"{stem}.json", {**emp.summary_dict(), "threads": args.threads})
    print(out / f"{stem}.json")
    return EXIT_OK


# ---------------------------------------------------------------------------
# coverage
# ---------------------------------------------------------------------------


def _default_coverage_trio() -> tuple[dict, float]:
    base = dict(
        density=3.0e-4,
        inner_radius=100.0,
        beta=4.0,
        pathloss_only=True,
        seed=0,
    )
    trio = {
        "power": dict(
            base, scheme="power", power=PowerControlConfig(1.0, 20.0, 4.0)
        ),
        "contention": dict(
            base, scheme="contention", contention=ContentionConfig(1.0, 20.0)
        ),
        "hybrid": dict(
            base, scheme="hybrid", hybrid=HybridConfig(1.0, 20.0, 30.0, 4.0)
        ),
    }
    return trio, 600.0


def _cmd_coverage(args) -> int:
    if args.config is not None:
        raw = _load_yaml(args.config)
        window = float(raw.pop("window_radius", 600.0))
        cfgs = {}
        for name in ("power", "contention", "hybrid"):
            if name not in raw:
                raise ConfigurationError(f"coverage config missing '{name}' scenario")
            cfgs[name] = ScenarioConfig.from_dict(raw[name])
    else:
        trio, window = _default_coverage_trio()
        cfgs = {name: ScenarioConfig(**kw) for name, kw in trio.items()}
    trials = args.trials if args.trials is not None else 2000
    seed = args.seed if args.seed is not None else cfgs["contention"].seed
    result = mc.coverage_experiment(
        cfgs["power"],
        cfgs["contention"],
        cfgs["hybrid"],
        n_trials=int(trials),
        seed=int(seed),
        window_radius=window,
    )
    payload = {
        **result.as_dict(),
        "window_radius": window,
        "seed": int(seed),
        "config_hashes": {n: c.config_hash() for n, c in cfgs.items()},
        "threads": args.threads,
    }
    out = _out_dir(args)
    path = out / "coverage.json"
    _write_json(path, payload)
    print(path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# hidden
# ---------------------------------------------------------------------------


def _cmd_hidden(args) -> int:
    sc = _load_scenario(args)
    if not sc.hidden:
        raise ConfigurationError("hidden report needs a scenario with hidden: true")
    outer = sc.resolve_outer_radius()

    analytic = None
    if sc.scheme in ("power", "contention"):
        analytic = {}
        for measure in ("radial", "area"):
            analytic[measure] = {
                "k1": an.cumulant_for(1, sc, measure=measure, outer_radius=outer),
                "k2": an.cumulant_for(2, sc, measure=measure, outer_radius=outer),
            }
        centered = sc.with_updates(hidden=False, receiver_offset=0.0)
        analytic["centered"] = {
            "k1": an.cumulant_for(1, centered, outer_radius=outer),
            "k2": an.cumulant_for(2, centered, outer_radius=outer),
        }

    planar = mc.simulate_hidden(sc, mode="planar", keep_samples=False)
    report = {
        **_ident(sc),
        "receiver_offset": sc.receiver_offset,
        "outer_radius": outer,
        "analytic": analytic,
        "simulated": {
            "planar": {
                "mean": planar.mean,
                "variance": planar.variance,
                "trials": planar.trials,
            }
        },
        "threads": args.threads,
    }
    if sc.scheme in ("power", "contention"):
        radial = mc.simulate_hidden(sc, mode="radial_angle", keep_samples=False)
        report["simulated"]["radial_angle"] = {
            "mean": radial.mean,
            "variance": radial.variance,
            "trials": radial.trials,
        }
    out = _out_dir(args)
    path = out / f"hidden_{sc.scheme}_{sc.config_hash()}.json"
    _write_json(path, report)
    print(path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# canned parameter studies
# ---------------------------------------------------------------------------


def _study_scenario(scheme: str, **over) -> ScenarioConfig:
    kw = dict(
        scheme=scheme,
        density=3.0e-4,
        inner_radius=100.0,
        beta=4.0,
        pathloss_only=True,
        trials=STUDY_TRIALS,
        seed=0,
    )
    if scheme == "power":
        kw["power"] = PowerControlConfig(1.0, 20.0, 4.0)
    elif scheme == "contention":
        kw["contention"] = ContentionConfig(1.0, 20.0)
    elif scheme == "hybrid":
        kw["hybrid"] = HybridConfig(1.0, 20.0, 30.0, 4.0)
    else:
        kw["fixed_power"] = 1.0
    kw.update(over)
    return ScenarioConfig(**kw)


_SHADOW_4DB = CompositeChannelParams.from_db(math.inf, 0.0, 4.0)


def _curve_inverted(name, sc, **kwargs):
    return {"name": name, "kind": "inverted", "scenario": sc, "kwargs": kwargs}


def _curve_fit(name, sc):
    return {"name": name, "kind": "fit", "scenario": sc}


def _curve_sim(name, sc, sampling="field", mode=None):
    return {
        "name": name,
        "kind": "sim",
        "scenario": sc,
        "sampling": sampling,
        "mode": mode,
    }


def _study_fig2():
    return [
        _curve_sim("power", _study_scenario("power")),
        _curve_sim("contention", _study_scenario("contention")),
        _curve_sim("hybrid", _study_scenario("hybrid")),
    ]


def _study_fig3(scheme):
    curves = []
    for tag, over in (
        ("pathloss", {}),
        ("shadow", {"pathloss_only": False, "channel": _SHADOW_4DB}),
    ):
        sc = _study_scenario(scheme, **over)
        curves.append(_curve_inverted(f"inverted_{tag}", sc))
        curves.append(_curve_fit(f"fit_{tag}", sc))
        curves.append(_curve_sim(f"sim_{tag}", sc, sampling="independent"))
    return curves


def _hidden_study(scheme, **over):
    return _study_scenario(
        scheme, inner_radius=200.0, hidden=True, receiver_offset=100.0, **over
    )


def _study_fig5(scheme):
    hid = _hidden_study(scheme)
    cen = _study_scenario(scheme, inner_radius=200.0)
    charfn_kwargs = {"theta_nodes": 48}
    return [
        _curve_inverted("centered_inverted", cen),
        _curve_fit("centered_fit", cen),
        _curve_inverted("hidden_inverted", hid, charfn_kwargs=charfn_kwargs),
        _curve_fit("hidden_fit", hid),
        _curve_sim("hidden_sim", hid, mode="planar"),
    ]


def _study_fig6():
    return [
        _curve_sim("centered_sim", _study_scenario("hybrid", inner_radius=200.0)),
        _curve_sim("hidden_sim", _hidden_study("hybrid"), mode="planar"),
    ]


def _study_fig7(scheme):
    curves = [
        _curve_inverted("no_control", _study_scenario("none")),
        _curve_inverted("baseline", _study_scenario(scheme)),
    ]
    if scheme == "power":
        variants = (
            ("half_pmax", {"power": PowerControlConfig(0.5, 20.0, 4.0)}),
            ("double_rpwc", {"power": PowerControlConfig(1.0, 40.0, 4.0)}),
        )
    else:
        variants = (
            ("half_p", {"contention": ContentionConfig(0.5, 20.0)}),
            ("double_dmin", {"contention": ContentionConfig(1.0, 40.0)}),
        )
    for tag, over in variants:
        curves.append(_curve_inverted(tag, _study_scenario(scheme, **over)))
    curves.append(
        _curve_inverted("half_density", _study_scenario(scheme, density=1.5e-4))
    )
    curves.append(
        _curve_inverted("double_radius", _study_scenario(scheme, inner_radius=200.0))
    )
    return curves


def _study_fig8(scheme):
    curves = [_curve_inverted("pathloss", _study_scenario(scheme))]
    for m in (1, 100):
        sc = _study_scenario(
            scheme,
            pathloss_only=False,
            channel=CompositeChannelParams.from_db(m, 0.0, 4.0),
        )
        curves.append(_curve_inverted(f"fading_m{m}_shadow", sc))
    return curves


STUDIES = {
    "fig2": _study_fig2,
    "fig3a": lambda: _study_fig3("power"),
    "fig3b": lambda: _study_fig3("contention"),
    "fig5a": lambda: _study_fig5("power"),
    "fig5b": lambda: _study_fig5("contention"),
    "fig6": _study_fig6,
    "fig7a": lambda: _study_fig7("power"),
    "fig7b": lambda: _study_fig7("contention"),
    "fig8a": lambda: _study_fig8("power"),
    "fig8b": lambda: _study_fig8("contention"),
}


def _cmd_reproduce(args) -> int:
    if args.figure not in STUDIES:
        raise ConfigurationError(
            f"unknown study {args.figure!r}; expected one of {sorted(STUDIES)}"
        )
    curves = STUDIES[args.figure]()
    out = _out_dir(args) / args.figure
    out.mkdir(parents=True, exist_ok=True)

    manifest_curves = []
    for curve in curves:
        sc = curve["scenario"]
        if args.seed is not None:
            sc = sc.with_updates(seed=int(args.seed))
        if args.trials is not None and curve["kind"] == "sim":
            sc = sc.with_updates(trials=int(args.trials))
        name = curve["name"]
        path = out / f"{args.figure}_{name}.csv"
        entry = {
            "name": name,
            "file": path.name,
            "kind": curve["kind"],
            **_ident(sc),
        }
        if curve["kind"] == "inverted":
            est = pdf_for_scenario(sc, **curve["kwargs"])
            _write_csv(
                path,
                {**_ident(sc), "kind": "inverted_density", "mass": est.mass},
                ("y", "density"),
                zip(est.y, est.density),
            )
        elif curve["kind"] == "fit":
            cs = an.closed_form_cumulants(sc)
            fit = an.lognormal_fit(cs.k1, cs.k2)
            y = _fit_grid(fit)
            _write_csv(
                path,
                {**_ident(sc), "kind": "lognormal_fit", "mu": fit.mu,
                 "sigma2": fit.sigma2},
                ("y", "density"),
                zip(y, fit.pdf(y)),
            )
            entry.update(k1=cs.k1, k2=cs.k2, mu=fit.mu, sigma2=fit.sigma2)
        else:
            if curve["mode"] is not None:
                emp = mc.simulate_hidden(
                    sc,
                    mode=curve["mode"],
                    tail_fraction=STUDY_TAIL_FRACTION,
                    keep_samples=False,
                )
            else:
                emp = mc.simulate_aggregate(
                    sc,
                    tail_fraction=STUDY_TAIL_FRACTION,
                    scheme_sampling=curve["sampling"],
                    keep_samples=False,
                )
            _write_csv(
                path,
                {**_ident(sc), "trials": emp.trials, "zero_mass": emp.zero_mass},
                ("bin_left", "bin_right", "density"),
                emp.histogram_rows(),
            )
            entry.update(
                trials=emp.trials,
                k1=emp.kstats[0],
                k2=emp.kstats[1],
                k3=emp.kstats[2],
                k4=emp.kstats[3],
                sampling=curve.get("sampling"),
            )
        manifest_curves.append(entry)

    manifest = {
        "figure": args.figure,
        "curves": manifest_curves,
        "settings": {
            "sim_tail_fraction": STUDY_TAIL_FRACTION,
            "trials_override": args.trials,
            "seed_override": args.seed,
            "threads": args.threads,
        },
    }
    path = out / "manifest.json"
    _write_json(path, manifest)
    print(path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# validation suite
# ---------------------------------------------------------------------------

PROFILES = {
    "strict": dict(
        mc_trials=25_000,
        retention_realizations=500,
        channel_draws=600_000,
        stable_pdf=True,
        coverage_trials=2000,
    ),
    "fast": dict(
        mc_trials=4_000,
        retention_realizations=160,
        channel_draws=150_000,
        stable_pdf=False,
        coverage_trials=0,
    ),
}


def _check_charfn_sanity(profile) -> tuple[bool, str]:
    scenarios = [
        _study_scenario("power"),
        _study_scenario(
            "contention", pathloss_only=False, channel=_SHADOW_4DB
        ),
        _study_scenario("none"),
        _hidden_study("contention"),
    ]
    omega = np.concatenate([-np.geomspace(1e12, 1e2, 20), [0.0],
                            np.geomspace(1e2, 1e12, 20)])
    worst_unit = 0.0
    worst_bound = 0.0
    worst_herm = 0.0
    for sc in scenarios:
        kwargs = {"theta_nodes": 48} if sc.hidden else {}
        charfn = an.charfn_for(sc, **kwargs)
        phi = charfn(omega)
        worst_unit = max(worst_unit, abs(phi[20] - 1.0))
        worst_bound = max(worst_bound, float(np.max(np.abs(phi))) - 1.0)
        worst_herm = max(
            worst_herm, float(np.max(np.abs(phi[:20] - np.conj(phi[:20:-1]))))
        )
    ok = bool(worst_unit <= 1e-9 and worst_bound <= 1e-9 and worst_herm <= 1e-9)
    return ok, (
        f"|phi(0)-1|={worst_unit:.1e} maxmod-1={worst_bound:.1e} "
        f"hermitian gap={worst_herm:.1e}"
    )


def _check_moments_match_charfn(profile) -> tuple[bool, str]:
    shadow = {"pathloss_only": False, "channel": _SHADOW_4DB}
    worst = 0.0
    for scheme in ("power", "contention"):
        for over in ({}, shadow):
            sc = _study_scenario(scheme, **over)
            closed = an.closed_form_cumulants(sc)
            numeric = an.cumulants_from_charfn(an.charfn_for(sc), 2)
            worst = max(
                worst,
                abs(numeric.k1 / closed.k1 - 1.0),
                abs(numeric.k2 / closed.k2 - 1.0),
            )
    return worst <= 5e-3, f"max rel gap {worst:.2e} (tol 5e-3)"


def _check_retention(profile) -> tuple[bool, str]:
    region = AnnulusRegion(0.0, 500.0)
    n_real = profile["retention_realizations"]
    detail = []
    ok = True
    for d_min in (10.0, 20.0, 40.0):
        target = retaining_probability(3e-4, d_min)
        ratios = np.empty(n_real)
        for i in range(n_real):
            rng = mc.trial_rng(2024, i)
            pts = sample_poisson_annulus(3e-4, region, seed=rng)
            kept = matern_hardcore_thin(pts, d_min, seed=rng)
            inner = interior_mask(pts, region, d_min)
            kept_inner = interior_mask(kept, region, d_min)
            n_in = int(np.sum(inner))
            ratios[i] = np.sum(kept_inner) / n_in if n_in else np.nan
        ratios = ratios[np.isfinite(ratios)]
        se = float(np.std(ratios, ddof=1)) / math.sqrt(ratios.size)
        gap = abs(float(np.mean(ratios)) - target)
        ok = ok and gap <= 3.0 * se
        detail.append(f"d={d_min:g}: gap={gap:.1e} (3se={3 * se:.1e})")
    return ok, "; ".join(detail)


def _check_channel_moments(profile) -> tuple[bool, str]:
    n = profile["channel_draws"]
    detail = []
    ok = True
    for m in (1, 100):
        params = CompositeChannelParams.from_db(m, 0.0, 4.0)
        mu, var = composite_lognormal_moments(params)
        ln_g = np.log(sample_gain(params, "exact_composite", 99, n))
        mu_hat = float(np.mean(ln_g))
        var_hat = float(np.var(ln_g, ddof=1))
        se_mu = math.sqrt(var_hat / n)
        se_var = math.sqrt(max(np.mean((ln_g - mu_hat) ** 4) - var_hat**2, 0.0) / n)
        ok_mu = abs(mu_hat - mu) <= max(0.05 * abs(mu), 4.0 * se_mu)
        ok_var = abs(var_hat - var) <= max(0.05 * var, 4.0 * se_var)
        ok = ok and ok_mu and ok_var
        detail.append(
            f"m={m}: dmu={abs(mu_hat - mu):.1e} dvar={abs(var_hat - var):.1e}"
        )
    return ok, "; ".join(detail)


def _check_simulation_moments(profile) -> tuple[bool, str]:
    detail = []
    ok = True
    for scheme in ("power", "contention"):
        sc = _study_scenario(
            scheme, outer_radius=1414.2, trials=profile["mc_trials"], seed=11
        )
        emp = mc.simulate_aggregate(
            sc, scheme_sampling="independent", keep_samples=False
        )
        closed = an.closed_form_cumulants(sc, outer_radius=1414.2)
        gap1 = abs(emp.mean - closed.k1)
        gap2 = abs(emp.variance - closed.k2)
        tol1 = max(4.0 * emp.standard_error(1), 0.02 * closed.k1)
        tol2 = max(4.0 * emp.standard_error(2), 0.02 * closed.k2)
        ok = ok and gap1 <= tol1 and gap2 <= tol2
        detail.append(
            f"{scheme}: k1 gap={gap1 / closed.k1:.1%} k2 gap={gap2 / closed.k2:.1%}"
        )
    return ok, "; ".join(detail)


def _check_stable_pdf(profile) -> tuple[bool, str]:
    sc = _study_scenario("contention", inner_radius=1e-3, outer_radius=1e4)
    k = an.k_factor_contention(sc)
    levy_scale = math.pi**3 * sc.density**2 * k**2 / 2.0
    mode = levy_scale / 3.0
    est = pdf_from_charfn(
        build_characteristic_grid(an.charfn_for(sc)), y_max=80.0 * mode
    )
    stable = an.stable_density_for(sc.with_updates(inner_radius=0.0))
    y = np.geomspace(mode / 5.0, 15.0 * mode, 900)
    exact = stable(y)
    sup = float(np.max(np.abs(est.interp(y) - exact)))
    peak = float(np.max(exact))
    return sup <= 0.02 * peak, f"sup={sup / peak:.1%} of peak (tol 2%)"


def _check_coverage(profile) -> tuple[bool, str]:
    trio, window = _default_coverage_trio()
    cfgs = {name: ScenarioConfig(**kw) for name, kw in trio.items()}
    result = mc.coverage_experiment(
        cfgs["power"],
        cfgs["contention"],
        cfgs["hybrid"],
        n_trials=profile["coverage_trials"],
        seed=3,
        window_radius=window,
    )
    gap_p = abs(result.power - 1.0093)
    gap_h = abs(result.hybrid - 2.0229)
    ok = gap_p <= 0.02 * 1.0093 and gap_h <= 0.02 * 2.0229
    return ok, f"power={result.power:.4f} hybrid={result.hybrid:.4f}"


def _cmd_validate(args) -> int:
    profile = PROFILES[args.tolerance_profile]
    checks = [
        ("charfn_sanity", _check_charfn_sanity),
        ("moments_match_charfn", _check_moments_match_charfn),
        ("hardcore_retention", _check_retention),
        ("channel_lngain_moments", _check_channel_moments),
        ("simulation_matches_moments", _check_simulation_moments),
    ]
    if profile["stable_pdf"]:
        checks.append(("stable_pdf_matches_inversion", _check_stable_pdf))
    if profile["coverage_trials"]:
        checks.append(("coverage_ratios", _check_coverage))

    results = {}
    failures = []
    for name, fn in checks:
        ok, detail = fn(profile)
        results[name] = {"pass": ok, "detail": detail}
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        if not ok:
            failures.append(name)

    if args.out_dir is not None:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_json(
            out / f"validate_{args.tolerance_profile}.json",
            {"profile": args.tolerance_profile, "checks": results},
        )
    if failures:
        raise ValidationFailure(f"checks failed: {', '.join(failures)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing / dispatch
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML scenario description")
    common.add_argument("--seed", type=int, help="override the scenario seed")
    common.add_argument("--trials", type=int, help="override the trial count")
    common.add_argument("--out-dir", default=None, help="output directory")
    common.add_argument(
        "--threads",
        type=int,
        default=1,
        help="recorded in outputs; execution is always single-threaded",
    )
    common.add_argument(
        "--tolerance-profile",
        choices=sorted(PROFILES),
        default="strict",
        help="strictness of the validation suite",
    )

    parser = argparse.ArgumentParser(
        prog="crinterf",
        description="aggregate-interference distributions under spectrum "
        "sharing control schemes",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    handlers = {
        "pdf": (_cmd_pdf, "invert a scenario's characteristic function"),
        "fit": (_cmd_fit, "lognormal fit from the first two cumulants"),
        "simulate": (_cmd_simulate, "Monte Carlo histogram and summary"),
        "coverage": (_cmd_coverage, "covered-area ratios of the schemes"),
        "hidden": (_cmd_hidden, "offset-receiver interference report"),
        "validate": (_cmd_validate, "run the numeric self-checks"),
    }
    for name, (fn, help_text) in handlers.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=fn)
    p = sub.add_parser(
        "reproduce", parents=[common], help="run a canned parameter study"
    )
    p.add_argument("figure", help=f"one of {', '.join(sorted(STUDIES))}")
    p.set_defaults(func=_cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ConfigurationError, DomainError, ApplicabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except CRInterfError as exc:
        # remaining library failures are numeric/runtime conditions
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
