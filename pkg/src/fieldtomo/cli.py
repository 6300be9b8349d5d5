"""Command-line front end.

Subcommands:

* ``reconstruct``  -- simulate one protocol run and reconstruct the state
* ``noise-sweep``  -- finite-shot scaling study on a grid of (n_m, n_t)
* ``dce``          -- quench-generated states, conditioning, tomography
* ``estimate-g``   -- locate the coupling from a z spectrum alone

Configuration is INI (sections [state], [probe], [plan], [spectral],
[dce]); a ``--preset`` fills in a named parameter bundle and an optional
``--config`` file overlays it, followed by individual flags.  All
outputs are byte-deterministic for a fixed configuration: fixed float
formatting, sorted JSON keys, no timestamps.

Exit codes: 0 success, 2 unusable configuration, 3 violated physics or
data contract, 4 unresolvable spectral windows.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import dce as dce_mod
from . import reconstruct as rec_mod
from .exceptions import (
    ConfigError,
    DegenerateBranchError,
    FieldTomoError,
    exit_code_for,
)
from .fock import FieldState, density_from_pure, embed, fidelity
from .measurement import MeasurementPlan, sample_trajectory, write_trajectory_csv
from .probe import ProbeConfig
from .spectral import dft, max_half_width, rabi_comb, write_spectrum_csv
from .states import coherent_state, load_amplitudes

__all__ = ["main"]


DEFAULTS: dict[str, dict[str, str]] = {
    "state": {
        "kind": "fock",            # fock | superposition | coherent | file
        "n": "1",                  # fock index
        "terms": "",               # "n:re:im; n:re:im; ..."
        "alpha_re": "0.35",
        "alpha_im": "0.6062177826491071",
        "cutoff": "12",
        "file": "",
    },
    "probe": {
        "g": "1.0",
    },
    "plan": {
        "delta_t": "auto",         # auto = 0.075 / g
        "n_t": "4096",
        "n_m": "inf",              # inf = exact expectation values
        "axes": "xyz",
        "gamma": "0.0",
        "seed": "12345",
        # noise-sweep grids (space-separated lists)
        "n_m_list": "10 30 100 300 1000",
        "n_t_list": "128 1024",
        "n_seeds": "20",
        "t_total": "",             # set for fixed-duration sweeps
    },
    "spectral": {
        "half_width": "4",
        "n_max": "8",
        "population_floor": "1e-3",
        "refine_passes": "3",
        "g_min": "0.5",
        "g_max": "2.0",
    },
    "dce": {
        "omega": "1.0",
        "g_over_omega": "0.5",
        "tau": "auto",             # auto = pi / (2 g)
        "tau_list": "",
        "cutoff": "31",
        "dt_int": "auto",
    },
}

#: ready-made parameter bundles, keyed by preset id
PRESETS: dict[str, dict[str, dict[str, str]]] = {
    "paper-state1": {
        "state": {
            "kind": "superposition",
            "terms": "1:0.7071067811865476:0; 2:0.7071067811865476:0",
            "cutoff": "8",
        },
        "plan": {"delta_t": "0.075", "n_t": "4096", "n_m": "inf"},
    },
    "paper-state2": {
        "state": {
            "kind": "superposition",
            "terms": "1:0.7071067811865476:0; 2:0.5:0.5",
            "cutoff": "8",
        },
        "plan": {"delta_t": "0.075", "n_t": "4096", "n_m": "inf"},
    },
    "paper-coherent": {
        "state": {
            "kind": "coherent",
            "alpha_re": "0.35",
            "alpha_im": "0.6062177826491071",
            "cutoff": "12",
        },
        "plan": {"delta_t": "0.075", "n_t": "4096", "n_m": "inf"},
    },
    "paper-fig6-left": {
        "state": {"kind": "fock", "n": "1", "cutoff": "8"},
        "plan": {
            "axes": "z",
            "n_m_list": "10 30 100 300 1000",
            "n_t_list": "128 1024",
            "n_seeds": "20",
            "t_total": "62.83185307179586",  # 20 pi / Omega_1 at g = 1
        },
    },
    "paper-fig6-right": {
        "state": {"kind": "fock", "n": "1", "cutoff": "8"},
        "plan": {
            "axes": "z",
            "delta_t": "0.075",
            "n_m_list": "1000",
            "n_t_list": "128 256 512 1024",
            "n_seeds": "20",
            "t_total": "",
        },
    },
    "paper-dce": {
        "dce": {
            "omega": "1.0",
            "g_over_omega": "0.5",
            "tau": "auto",
            "cutoff": "31",
        },
        "plan": {"delta_t": "0.075", "n_t": "4096", "n_m": "inf"},
    },
}


# ---------------------------------------------------------------- config


def _merged_config(args) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    cp.read_dict(DEFAULTS)
    if args.preset:
        if args.preset not in PRESETS:
            raise ConfigError(
                f"unknown preset {args.preset!r}; have: {', '.join(sorted(PRESETS))}"
            )
        cp.read_dict(PRESETS[args.preset])
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        user = configparser.ConfigParser(interpolation=None)
        try:
            user.read(path)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        for section in user.sections():
            if section not in DEFAULTS:
                raise ConfigError(f"unknown config section [{section}]", key=section)
            for option, value in user.items(section):
                if option not in DEFAULTS[section]:
                    raise ConfigError(
                        f"unknown option {option!r} in section [{section}]",
                        key=f"{section}.{option}",
                    )
                cp.set(section, option, value)
    if args.seed is not None:
        cp.set("plan", "seed", str(args.seed))
    if args.state_file:
        cp.set("state", "kind", "file")
        cp.set("state", "file", args.state_file)
    return cp


def _get_float(cp, section: str, option: str) -> float:
    raw = cp.get(section, option)
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(
            f"{section}.{option} must be a number, got {raw!r}",
            key=f"{section}.{option}",
        ) from None


def _get_int(cp, section: str, option: str) -> int:
    raw = cp.get(section, option)
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(
            f"{section}.{option} must be an integer, got {raw!r}",
            key=f"{section}.{option}",
        ) from None


def _get_int_list(cp, section: str, option: str) -> list[int]:
    raw = cp.get(section, option).replace(",", " ")
    try:
        values = [int(tok) for tok in raw.split()]
    except ValueError:
        raise ConfigError(
            f"{section}.{option} must be a list of integers, got {raw!r}",
            key=f"{section}.{option}",
        ) from None
    if not values:
        raise ConfigError(f"{section}.{option} is empty", key=f"{section}.{option}")
    return values


def _get_n_m(cp) -> Optional[int]:
    raw = cp.get("plan", "n_m").strip().lower()
    if raw in ("inf", "infinite", "none", ""):
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(
            f"plan.n_m must be an integer or 'inf', got {raw!r}", key="plan.n_m"
        ) from None


def _get_axes(cp) -> tuple[str, ...]:
    raw = cp.get("plan", "axes").replace(",", " ").replace(" ", "")
    axes = tuple(dict.fromkeys(raw))  # dedupe, keep order
    if not axes or any(a not in "xyz" for a in axes):
        raise ConfigError(f"plan.axes must combine x, y, z; got {raw!r}", key="plan.axes")
    return axes


def _get_delta_t(cp, g: float) -> float:
    raw = cp.get("plan", "delta_t").strip().lower()
    if raw == "auto":
        return 0.075 / g
    return _get_float(cp, "plan", "delta_t")


def _parse_terms(raw: str) -> list[tuple[int, complex]]:
    out = []
    for chunk in raw.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [p.strip() for p in chunk.split(":")]
        if len(parts) != 3:
            raise ConfigError(
                f"state.terms entries must be n:re:im, got {chunk!r}", key="state.terms"
            )
        try:
            out.append((int(parts[0]), complex(float(parts[1]), float(parts[2]))))
        except ValueError:
            raise ConfigError(
                f"cannot parse state.terms entry {chunk!r}", key="state.terms"
            ) from None
    return out


def _build_state(cp) -> FieldState:
    from .states import superposition

    kind = cp.get("state", "kind").strip().lower()
    cutoff = _get_int(cp, "state", "cutoff")
    if kind == "fock":
        from .fock import fock_state

        return fock_state(_get_int(cp, "state", "n"), cutoff)
    if kind == "superposition":
        terms = _parse_terms(cp.get("state", "terms"))
        if not terms:
            raise ConfigError("state.terms is empty", key="state.terms")
        return superposition(terms, cutoff)
    if kind == "coherent":
        alpha = complex(
            _get_float(cp, "state", "alpha_re"), _get_float(cp, "state", "alpha_im")
        )
        return coherent_state(alpha, cutoff)
    if kind == "file":
        path = cp.get("state", "file").strip()
        if not path:
            raise ConfigError("state.kind = file but state.file is empty", key="state.file")
        if not Path(path).is_file():
            raise ConfigError(f"state file not found: {path}", key="state.file")
        return load_amplitudes(path)
    raise ConfigError(f"unknown state.kind {kind!r}", key="state.kind")


def _get_plan(cp, g: float, axes=None, n_t=None, delta_t=None, n_m="use-config", seed=None):
    return MeasurementPlan(
        delta_t=_get_delta_t(cp, g) if delta_t is None else delta_t,
        n_t=_get_int(cp, "plan", "n_t") if n_t is None else n_t,
        n_m=_get_n_m(cp) if n_m == "use-config" else n_m,
        axes=_get_axes(cp) if axes is None else axes,
        gamma=_get_float(cp, "plan", "gamma"),
        seed=_get_int(cp, "plan", "seed") if seed is None else seed,
    )


# ---------------------------------------------------------------- output


def _dump_json(payload, path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _complex_pairs(values) -> Optional[list[dict]]:
    if values is None:
        return None
    return [{"re": float(v.real), "im": float(v.imag)} for v in values]


def _result_payload(result: rec_mod.ReconstructionResult) -> dict:
    payload = {
        "populations": [float(p) for p in result.populations],
        "coherences": _complex_pairs(result.coherences),
        "phases": [float(p) for p in result.phases],
        "chain_breaks": list(result.chain_breaks),
        "trace_deficit": result.trace_deficit,
        "diagnostics": {
            "partial": result.partial,
            "phase_defined": [bool(b) for b in result.phase_defined],
            "warnings": list(result.warnings),
            **{
                k: v
                for k, v in result.diagnostics.items()
                if k != "raw_populations"
            },
            "raw_populations": result.diagnostics.get("raw_populations"),
        },
    }
    if result.fidelity_vs_reference is not None:
        payload["fidelity_vs_reference"] = result.fidelity_vs_reference
    if result.g_estimate is not None:
        payload["g_estimate"] = result.g_estimate
    return payload


def _peaks_payload(peaks) -> list[dict]:
    return [
        {
            "label": p.label,
            "family": p.family,
            "center": p.center,
            "area_re": float(p.area.real),
            "area_im": float(p.area.imag),
            "snr": None if p.snr is None else float(p.snr),
        }
        for p in peaks
    ]


# -------------------------------------------------------------- commands


def cmd_reconstruct(cp, out_dir: Path) -> int:
    state = _build_state(cp)
    g = _get_float(cp, "probe", "g")
    cfg = ProbeConfig(g=g)
    plan = _get_plan(cp, g)
    rho = density_from_pure(state)
    traj = sample_trajectory(rho, cfg, plan)
    write_trajectory_csv(traj, out_dir / "trajectory.csv")

    spectra = {}
    for axis in traj.axes():
        spectra[axis] = dft(getattr(traj, axis), traj.times, axis=axis)
        write_spectrum_csv(spectra[axis], out_dir / f"spectrum_{axis}.csv")
    if "z" not in spectra:
        raise ConfigError("plan.axes must include z for reconstruction", key="plan.axes")

    n_max = _get_int(cp, "spectral", "n_max")
    half_width = _get_int(cp, "spectral", "half_width")
    peaks = rec_mod.peak_report(
        g, n_max, spectra["z"], spectra.get("x"), spectra.get("y"), half_width
    )
    _dump_json(_peaks_payload(peaks), out_dir / "peaks.json")

    result = rec_mod.reconstruct_from_spectra(
        g,
        spectra["z"],
        spectra.get("x"),
        spectra.get("y"),
        n_max=n_max,
        half_width=half_width,
        population_floor=_get_float(cp, "spectral", "population_floor"),
        refine_passes=_get_int(cp, "spectral", "refine_passes"),
        reference=state,
    )
    _dump_json(_result_payload(result), out_dir / "reconstruction.json")
    print(f"wrote {out_dir / 'reconstruction.json'}")
    return 0


def _sweep_points(cp) -> tuple[list[int], list[int], Optional[float]]:
    n_m_list = _get_int_list(cp, "plan", "n_m_list")
    n_t_list = _get_int_list(cp, "plan", "n_t_list")
    raw_t = cp.get("plan", "t_total").strip()
    t_total = float(raw_t) if raw_t else None
    return n_m_list, n_t_list, t_total


def cmd_noise_sweep(cp, out_dir: Path) -> int:
    """Scaling of the spectral noise floor with shots and record length.

    Benchmarks on the first Rabi harmonic: the signal size S is the
    refined rho_11 estimate and the floor excludes only the DC and
    +-2 Omega_1 windows.
    """
    state = _build_state(cp)
    g = _get_float(cp, "probe", "g")
    cfg = ProbeConfig(g=g)
    rho = density_from_pure(state)
    base_seed = _get_int(cp, "plan", "seed")
    n_seeds = _get_int(cp, "plan", "n_seeds")
    if n_seeds < 1:
        raise ConfigError("plan.n_seeds must be >= 1", key="plan.n_seeds")
    half_width = _get_int(cp, "spectral", "half_width")
    refine = _get_int(cp, "spectral", "refine_passes")
    n_m_list, n_t_list, t_total = _sweep_points(cp)
    comb = rabi_comb(g, 1)

    rows = []
    for n_t in sorted(set(n_t_list)):
        delta_t = (t_total / n_t) if t_total is not None else _get_delta_t(cp, g)
        for n_m in sorted(set(n_m_list)):
            xis, snrs = [], []
            for rep in range(n_seeds):
                plan = _get_plan(
                    cp,
                    g,
                    axes=("z",),
                    n_t=n_t,
                    delta_t=delta_t,
                    n_m=n_m,
                    seed=base_seed + rep,
                )
                traj = sample_trajectory(rho, cfg, plan)
                spec = dft(traj.z, traj.times, axis="z")
                hw = min(half_width, max_half_width([0.0, 2.0 * g, -2.0 * g], spec))
                ests = rec_mod.populations_from_z(spec, comb, hw, refine)
                model = ests[0] + ests[1] * np.cos(2.0 * g * traj.times)
                xi = rec_mod.residual_floor(
                    spec, model, [(0.0, hw), (2.0 * g, hw), (-2.0 * g, hw)]
                )
                xis.append(xi)
                snrs.append(ests[1] / xi)
            rows.append(
                {
                    "n_m": n_m,
                    "n_t": n_t,
                    "xi": float(np.mean(xis)),
                    "snr": float(np.mean(snrs)),
                }
            )

    csv_path = out_dir / "noise_sweep.csv"
    with open(csv_path, "w", newline="") as fh:
        fh.write("n_m,n_t,xi,snr\n")
        for row in rows:
            fh.write(
                f"{row['n_m']},{row['n_t']},"
                f"{row['xi']:.17g},{row['snr']:.17g}\n"
            )

    def fit(pairs):
        if len(pairs) < 2:
            return None
        x = np.log10([p[0] for p in pairs])
        y = np.log10([p[1] for p in pairs])
        return float(np.polyfit(x, y, 1)[0])

    slopes = {"xi_vs_n_m": {}, "snr_vs_n_t": {}}
    for n_t in sorted(set(r["n_t"] for r in rows)):
        pts = [(r["n_m"], r["xi"]) for r in rows if r["n_t"] == n_t]
        slope = fit(pts)
        if slope is not None:
            slopes["xi_vs_n_m"][str(n_t)] = slope
    for n_m in sorted(set(r["n_m"] for r in rows)):
        pts = [(r["n_t"], r["snr"]) for r in rows if r["n_m"] == n_m]
        slope = fit(pts)
        if slope is not None:
            slopes["snr_vs_n_t"][str(n_m)] = slope
    _dump_json(slopes, out_dir / "noise_sweep_slopes.json")
    print(f"wrote {csv_path}")
    return 0


def _dce_config(cp, tau: float) -> dce_mod.DceConfig:
    raw_dt = cp.get("dce", "dt_int").strip().lower()
    return dce_mod.DceConfig(
        g_over_omega=_get_float(cp, "dce", "g_over_omega"),
        tau=tau,
        omega=_get_float(cp, "dce", "omega"),
        cutoff=_get_int(cp, "dce", "cutoff"),
        dt_int=None if raw_dt in ("auto", "") else _get_float(cp, "dce", "dt_int"),
    )


def cmd_dce(cp, out_dir: Path) -> int:
    omega = _get_float(cp, "dce", "omega")
    g_quench = _get_float(cp, "dce", "g_over_omega") * omega
    raw_tau = cp.get("dce", "tau").strip().lower()
    tau_main = math.pi / (2.0 * g_quench) if raw_tau == "auto" else _get_float(cp, "dce", "tau")
    raw_list = cp.get("dce", "tau_list").strip()
    taus = [float(tok) for tok in raw_list.split()] if raw_list else []
    if tau_main not in taus:
        taus.append(tau_main)

    points = []
    pair_pm = None
    for tau in taus:
        cfg = _dce_config(cp, tau)
        joint = dce_mod.evolve_rabi(cfg)
        pair = dce_mod.condition_on_qubit(joint, basis="ge")
        points.append(dce_mod.dce_record(cfg, joint, pair))
        if tau == tau_main:
            pair_pm = dce_mod.condition_on_qubit(joint, basis="pm")

    tomo: dict = {"tau": tau_main, "warnings": []}
    phi_plus, phi_minus = pair_pm.states
    if phi_plus is None or phi_minus is None:
        raise DegenerateBranchError("a |+-> conditional branch has zero weight")
    g_probe = _get_float(cp, "probe", "g")
    probe_cfg = ProbeConfig(g=g_probe)
    plan = _get_plan(cp, g_probe)
    n_max = _get_int(cp, "spectral", "n_max")
    half_width = _get_int(cp, "spectral", "half_width")
    floor = _get_float(cp, "spectral", "population_floor")
    refine = _get_int(cp, "spectral", "refine_passes")

    rec_states = {}
    for label, phi in (("plus", phi_plus), ("minus", phi_minus)):
        traj = sample_trajectory(density_from_pure(phi), probe_cfg, plan)
        result = rec_mod.reconstruct_state(
            traj,
            g_probe,
            n_max=n_max,
            half_width=half_width,
            population_floor=floor,
            refine_passes=refine,
            reference=phi,
        )
        rec_states[label] = result.state
        tomo[f"fidelity_phi_{label}"] = result.fidelity_vs_reference
        tomo["warnings"].extend(result.warnings)

    try:
        rec_g, rec_e = dce_mod.recombine_branches(
            rec_states["plus"], rec_states["minus"], pair_pm.c_g, pair_pm.c_e
        )
    except DegenerateBranchError as exc:
        tomo["recombined"] = None
        tomo["warnings"].append(f"recombination skipped: {exc}")
    else:
        cut = max(rec_g.cutoff, pair_pm.phi_g.cutoff if pair_pm.phi_g else 0)
        tomo["recombined"] = {
            "fidelity_phi_g": None
            if pair_pm.phi_g is None
            else fidelity(embed(rec_g, cut), embed(pair_pm.phi_g, cut)),
            "fidelity_phi_e": None
            if pair_pm.phi_e is None
            else fidelity(embed(rec_e, cut), embed(pair_pm.phi_e, cut)),
        }

    _dump_json({"points": points, "tomography": tomo}, out_dir / "dce.json")
    print(f"wrote {out_dir / 'dce.json'}")
    return 0


def cmd_estimate_g(cp, out_dir: Path) -> int:
    state = _build_state(cp)
    g_true = _get_float(cp, "probe", "g")
    cfg = ProbeConfig(g=g_true)
    plan = _get_plan(cp, g_true, axes=("z",))
    traj = sample_trajectory(density_from_pure(state), cfg, plan)
    spec = dft(traj.z, traj.times, axis="z")
    lo = _get_float(cp, "spectral", "g_min")
    hi = _get_float(cp, "spectral", "g_max")
    g_hat, score = rec_mod.estimate_coupling(spec, (lo, hi))
    payload = {
        "g_estimate": g_hat,
        "score": score,
        "search_range": [lo, hi],
        "n_t": int(plan.n_t),
        "delta_t": plan.delta_t,
    }
    _dump_json(payload, out_dir / "g_estimate.json")
    print(f"wrote {out_dir / 'g_estimate.json'}")
    return 0


# ------------------------------------------------------------------ main


def _print_defaults() -> None:
    cp = configparser.ConfigParser(interpolation=None)
    cp.read_dict(DEFAULTS)
    cp.write(sys.stdout)


def _error_payload(exc: FieldTomoError) -> dict:
    body = {
        "type": type(exc).__name__,
        "module": type(exc).__module__,
        "message": str(exc),
    }
    key = getattr(exc, "key", None)
    if key is not None:
        body["key"] = key
    return {"error": body}


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="fieldtomo",
        description="Stroboscopic probe-qubit tomography of a single field mode",
    )
    parser.add_argument(
        "--print-defaults",
        action="store_true",
        help="print the default configuration as INI and exit",
    )
    sub = parser.add_subparsers(dest="command")
    for name, fn in (
        ("reconstruct", cmd_reconstruct),
        ("noise-sweep", cmd_noise_sweep),
        ("dce", cmd_dce),
        ("estimate-g", cmd_estimate_g),
    ):
        p = sub.add_parser(name)
        p.set_defaults(func=fn)
        p.add_argument("--config", help="INI configuration file")
        p.add_argument("--preset", help=f"one of: {', '.join(sorted(PRESETS))}")
        p.add_argument("--seed", type=int, help="override plan.seed")
        p.add_argument("--out-dir", default=".", help="artifact directory")
        p.add_argument("--state-file", help="amplitude file (n re im per line)")

    args = parser.parse_args(argv)
    if args.print_defaults:
        _print_defaults()
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2

    try:
        cp = _merged_config(args)
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        return args.func(cp, out_dir)
    except FieldTomoError as exc:
        json.dump(_error_payload(exc), sys.stderr, indent=2, sort_keys=True)
        sys.stderr.write("\n")
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
