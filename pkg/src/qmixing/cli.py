"""Command-line surface: spectrum, contraction and cutoff analyses over model
files or inline model kinds, with machine-readable CSV or JSON output.

Exit codes: 0 success, 1 usage error, 2 model error, 3 numerical failure.
Outputs are byte-identical for identical configuration and seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .contraction import eta_ad_closed_form, eta_tr_estimate
from .cutoff import amplitude_damping_family, family_from_model, graph_state_family, run_cutoff_experiment
from .errors import CapExceededError, ModelFormatError, NumericalError, ShapeError, StateError
from .liouville import build_liouvillian
from .models import ModelSpec, load_model
from .spectral import spectral_report

USAGE_EXIT = 1
MODEL_EXIT = 2
NUMERICAL_EXIT = 3


class UsageError(Exception):
    """Structurally invalid invocation (missing required inputs)."""


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1 (argparse defaults to 2, which is reserved here)
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    model_path: Optional[str]
    kind: Optional[str]
    gamma: float
    alpha: float
    beta: float
    dim: int
    edges: Optional[str]
    n_vertices: Optional[int]
    t_start: float
    t_stop: float
    t_points: int
    t_scale: str
    n_ladder: Optional[list]
    restarts: int
    seed: int
    tol: float
    out: Optional[str]
    fmt: str


def _fmt_float(x: float) -> str:
    return repr(float(x))


def _fmt_complex(z: complex) -> str:
    sign = "+" if z.imag >= 0 else "-"
    return f"{_fmt_float(z.real)}{sign}{_fmt_float(abs(z.imag))}j"


def _parse_edges(text: str) -> list:
    edges = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        bits = part.split("-")
        if len(bits) != 2:
            raise ModelFormatError(f"edges: cannot parse {part!r}, expected 'a-b'")
        edges.append((int(bits[0]), int(bits[1])))
    return edges


def _spec_from_config(cfg: RunConfig) -> ModelSpec:
    if cfg.model_path:
        return load_model(cfg.model_path)
    if not cfg.kind:
        raise UsageError("either --model or --kind is required")
    if cfg.kind == "amplitude_damping":
        return ModelSpec("amplitude_damping", {"gamma": cfg.gamma, "alpha": cfg.alpha, "beta": cfg.beta})
    if cfg.kind == "depolarizing":
        return ModelSpec("depolarizing", {"dim": cfg.dim, "rate": cfg.gamma})
    if cfg.kind == "graph_state":
        edges = _parse_edges(cfg.edges) if cfg.edges else []
        n = cfg.n_vertices
        if n is None:
            n = max((max(e) for e in edges), default=0) + 1
        return ModelSpec(
            "graph_state",
            {"n_vertices": int(n), "edges": [list(e) for e in edges], "gamma": cfg.gamma},
        )
    raise ModelFormatError(f"kind: unknown model kind {cfg.kind!r}")


def _t_grid(cfg: RunConfig) -> np.ndarray:
    if cfg.t_points < 1:
        raise ModelFormatError("t-points must be >= 1")
    if cfg.t_scale == "linear":
        return np.linspace(cfg.t_start, cfg.t_stop, cfg.t_points)
    if cfg.t_scale == "log":
        if cfg.t_start <= 0:
            raise ModelFormatError("log scale requires t-start > 0")
        return np.geomspace(cfg.t_start, cfg.t_stop, cfg.t_points)
    raise ModelFormatError(f"t-scale: expected 'linear' or 'log', got {cfg.t_scale!r}")


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_spectrum(cfg: RunConfig) -> int:
    spec = _spec_from_config(cfg)
    L = build_liouvillian(spec.build())
    rep = spectral_report(L, tol=cfg.tol)
    pairs = [
        ("dim", str(L.dim)),
        ("gap", _fmt_float(rep.gap)),
        ("peripheral_count", str(len(rep.peripheral))),
        ("subdominant_modulus_rule", f"exp(-{_fmt_float(rep.gap)}*t)"),
        ("jordan_index", str(rep.jordan_index)),
        ("primitive", "true" if rep.primitive else "false"),
        ("kappa", _fmt_float(rep.kappa)),
        ("kappa_flagged", "true" if rep.kappa_flagged else "false"),
        ("eigen_residual", _fmt_float(rep.residual)),
    ]
    order = np.lexsort((rep.eigenvalues.imag, rep.eigenvalues.real))
    for rank, idx in enumerate(order[::-1]):
        pairs.append((f"eigenvalue_{rank}", _fmt_complex(complex(rep.eigenvalues[idx]))))
    if cfg.fmt == "csv":
        lines = ["key,value"] + [f"{k},{v}" for k, v in pairs]
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        _emit(cfg, json.dumps(dict(pairs), indent=2, sort_keys=True) + "\n")
    return 0


def cmd_contraction(cfg: RunConfig) -> int:
    spec = _spec_from_config(cfg)
    model = spec.build()
    L = build_liouvillian(model)
    grid = _t_grid(cfg)
    closed_form_ok = (
        spec.kind == "amplitude_damping"
        and float(spec.params.get("alpha", 0.0)) == 0.0
        and float(spec.params.get("beta", 0.0)) == 0.0
    )
    gamma = float(spec.params.get("gamma", 0.0)) if closed_form_ok else 0.0
    rows = []
    records = []
    for t in grid:
        est = eta_tr_estimate(L, float(t), restarts=cfg.restarts, seed=cfg.seed)
        cf = _fmt_float(eta_ad_closed_form(gamma, float(t))) if closed_form_ok else ""
        rows.append(
            f"{_fmt_float(t)},{_fmt_float(est.eta_lower)},{_fmt_float(est.eta_upper)},{cf},{est.method}"
        )
        records.append(
            {
                "t": float(t),
                "eta_lower": est.eta_lower,
                "eta_upper": est.eta_upper,
                "closed_form": float(cf) if cf else None,
                "method": est.method,
                "witness": [[z.real, z.imag] for z in est.witness],
            }
        )
    if cfg.fmt == "csv":
        _emit(cfg, "\n".join(["t,eta_lower,eta_upper,closed_form,method"] + rows) + "\n")
    else:
        _emit(cfg, json.dumps({"rows": records}, indent=2, sort_keys=True) + "\n")
    return 0


def _family_from_config(cfg: RunConfig):
    if cfg.model_path:
        spec = load_model(cfg.model_path)
        if spec.kind == "amplitude_damping":
            p = spec.params
            return amplitude_damping_family(
                float(p["gamma"]), float(p.get("alpha", 0.0)), float(p.get("beta", 0.0))
            )
        if spec.kind == "graph_state":
            return graph_state_family(float(spec.params["gamma"]))
        return family_from_model(spec.build())
    if cfg.kind == "amplitude_damping":
        return amplitude_damping_family(cfg.gamma, cfg.alpha, cfg.beta)
    if cfg.kind == "graph_state":
        return graph_state_family(cfg.gamma)
    raise ModelFormatError(
        f"kind: no cutoff family for {cfg.kind!r} (use amplitude_damping or graph_state)"
    )


def cmd_cutoff(cfg: RunConfig) -> int:
    family = _family_from_config(cfg)
    if not cfg.n_ladder:
        raise UsageError("cutoff requires --n-ladder")
    report = run_cutoff_experiment(
        family,
        cfg.n_ladder,
        restarts=cfg.restarts,
        seed=cfg.seed,
    )
    v = report.verdict
    if cfg.fmt == "csv":
        lines = ["n,t,eta_lower,eta_upper,t1,t2,c"]
        for i, n in enumerate(report.n_values):
            curve = report.curves[n]
            for j in range(curve.t.size):
                lines.append(
                    ",".join(
                        [
                            str(n),
                            _fmt_float(curve.t[j]),
                            _fmt_float(curve.eta_lower[j]),
                            _fmt_float(curve.eta_upper[j]),
                            _fmt_float(report.t1[i]),
                            _fmt_float(report.t2[i]),
                            _fmt_float(curve.c[j]),
                        ]
                    )
                )
        lines.append(f"# family,{report.family}")
        lines.append(f"# gap,{_fmt_float(report.gap)}")
        for i, n in enumerate(report.n_values):
            lines.append(f"# cutoff_time_n_{n},{_fmt_float(report.cutoff_times[i])}")
        lines.append(f"# verdict,{v.kind}")
        if v.nu_hat is not None:
            lines.append(f"# nu_hat,{_fmt_float(v.nu_hat)}")
            lines.append(f"# rate_ratio,{_fmt_float(v.rate_ratio)}")
        _emit(cfg, "\n".join(lines) + "\n")
    else:
        doc = {
            "family": report.family,
            "gap": report.gap,
            "threshold": report.threshold,
            "n_values": report.n_values,
            "t1": report.t1,
            "t2": report.t2,
            "cutoff_times": report.cutoff_times,
            "c_grid": report.c_grid,
            "curves": {
                str(n): {
                    "t": report.curves[n].t.tolist(),
                    "eta_lower": report.curves[n].eta_lower.tolist(),
                    "eta_upper": report.curves[n].eta_upper.tolist(),
                    "c": report.curves[n].c.tolist(),
                    "method": report.curves[n].method,
                }
                for n in report.n_values
            },
            "verdict": {
                "kind": v.kind,
                "nu_hat": v.nu_hat,
                "rate_ratio": v.rate_ratio,
                "window": list(v.window) if v.window else None,
            },
        }
        _emit(cfg, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_model_validate(cfg: RunConfig) -> int:
    if not cfg.model_path:
        raise UsageError("model-validate requires --model")
    spec = load_model(cfg.model_path)
    model = spec.build()
    _emit(cfg, f"ok: kind={spec.kind} dim={model.dim} lindblad_ops={len(model.lindblad_ops)}\n")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="qmixing", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("spectrum", "contraction", "cutoff", "model-validate"):
        p = sub.add_parser(name)
        p.add_argument("--model", help="path to a model file")
        p.add_argument("--kind", help="inline model kind: amplitude_damping, depolarizing, graph_state")
        p.add_argument("--gamma", type=float, default=1.0, help="decay rate (doubles as the depolarizing rate)")
        p.add_argument("--alpha", type=float, default=0.0)
        p.add_argument("--beta", type=float, default=0.0)
        p.add_argument("--dim", type=int, default=2)
        p.add_argument("--edges", help="graph edges as 'a-b,c-d,...'")
        p.add_argument("--n-vertices", type=int, default=None)
        p.add_argument("--t-start", type=float, default=0.0)
        p.add_argument("--t-stop", type=float, default=3.0)
        p.add_argument("--t-points", type=int, default=7)
        p.add_argument("--t-scale", choices=("linear", "log"), default="linear")
        p.add_argument("--n-ladder", help="comma-separated family sizes, e.g. 1000,10000,1000000")
        p.add_argument("--restarts", type=int, default=32)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    ladder = None
    if args.n_ladder:
        try:
            ladder = [int(float(x)) for x in args.n_ladder.split(",") if x.strip()]
        except ValueError as exc:
            raise ModelFormatError(f"n-ladder: cannot parse {args.n_ladder!r}") from exc
    return RunConfig(
        command=args.command,
        model_path=args.model,
        kind=args.kind,
        gamma=args.gamma,
        alpha=args.alpha,
        beta=args.beta,
        dim=args.dim,
        edges=args.edges,
        n_vertices=args.n_vertices,
        t_start=args.t_start,
        t_stop=args.t_stop,
        t_points=args.t_points,
        t_scale=args.t_scale,
        n_ladder=ladder,
        restarts=args.restarts,
        seed=args.seed,
        tol=args.tol,
        out=args.out,
        fmt=args.fmt,
    )


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        if cfg.command == "spectrum":
            return cmd_spectrum(cfg)
        if cfg.command == "contraction":
            return cmd_contraction(cfg)
        if cfg.command == "cutoff":
            return cmd_cutoff(cfg)
        if cfg.command == "model-validate":
            return cmd_model_validate(cfg)
        raise ModelFormatError(f"unknown command {cfg.command!r}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (ModelFormatError, ShapeError, StateError, CapExceededError, FileNotFoundError) as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return MODEL_EXIT
    except (NumericalError, ValueError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return NUMERICAL_EXIT


if __name__ == "__main__":
    sys.exit(main())
