"""Command-line front end: ``sinebits synthesize|verify|eval|report``.

Exit codes
----------
0  success, all non-advisory checks passed
1  verification ran but a non-advisory check failed
2  invalid configuration or malformed input file (message names the line)
3  accuracy budget infeasible
4  weight file corrupt, or checksum / digit-table mismatch
5  operation unsupported for this instance (e.g. whole-cube extension with d > 4)
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .builder import (
    HolderBudget,
    InfeasibleError,
    assemble,
    extend_linf,
    sample_digits,
    solve_hyperparams,
)
from .core import CapabilityError, Hyperparams, TargetFunction
from .evaluator import forward, forward_detailed
from .targets import BUILTINS, builtin_target, table_target
from .verifier import (
    ErrorReport,
    ModulusDescriptor,
    check_linf_bound,
    check_lp_bound,
    check_pointwise_bound,
    estimate_modulus,
)
from .weightio import IntegrityError, load_network, save_network

log = logging.getLogger("sinebits")

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_INTEGRITY, EXIT_CAPABILITY = range(6)

WEIGHTS_FILE = "weights.json"
MANIFEST_FILE = "manifest.json"
REPORT_FILE = "report.json"
SAMPLES_FILE = "samples.csv"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    target: str = "x"
    target_params: dict = field(default_factory=dict)
    d: int = 1
    N: int | None = None
    M: int | None = None
    delta: float | None = None
    p: float = 1.0
    mode: str = "off-region"
    budget: dict | None = None
    seed: int = 0
    samples: int = 100_000
    grid: int = 1000
    out: str = "out"

    def __post_init__(self):
        if self.mode not in ("off-region", "lp", "linf"):
            raise ConfigError(f"mode must be off-region, lp or linf, got {self.mode!r}")
        if not self.target.startswith("table:") and self.target not in BUILTINS:
            raise ConfigError(f"unknown target {self.target!r}; builtins are {BUILTINS}")
        explicit = [self.N, self.M, self.delta]
        if self.budget is None:
            if any(v is None for v in explicit):
                raise ConfigError("supply N, M and delta, or a budget {mu, alpha, epsilon}")
        elif any(v is not None for v in explicit):
            raise ConfigError("supply either (N, M, delta) or a budget, not both")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**raw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def target_function(self) -> TargetFunction:
        if self.target.startswith("table:"):
            f = table_target(self.target[len("table:"):])
            if f.d != self.d:
                raise ConfigError(f"table has d={f.d} but config says d={self.d}")
            return f
        return builtin_target(self.target, self.d, **self.target_params)

    def holder_budget(self) -> HolderBudget:
        b = dict(self.budget)
        try:
            return HolderBudget(
                mu=float(b.pop("mu")),
                alpha=float(b.pop("alpha")),
                epsilon=float(b.pop("epsilon")),
                mode=self.mode,
                p=float(b.pop("p", self.p)),
                delta=b.pop("delta", None),
            )
        except KeyError as exc:
            raise ConfigError(f"budget is missing {exc}") from exc

    def hyperparams(self) -> Hyperparams:
        if self.budget is not None:
            return solve_hyperparams(self.holder_budget(), self.d)
        p = math.inf if self.mode == "linf" else self.p
        return Hyperparams(self.d, self.N, self.M, self.delta, p)


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def load_config(path: str | None, overrides: list[str]) -> RunConfig:
    raw: dict = {}
    if path:
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: top level must be an object")
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        node = raw
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = _parse_value(value)
    return RunConfig.from_dict(raw)


# ---------------------------------------------------------------- commands


def _modulus_for(cfg: RunConfig, f: TargetFunction) -> ModulusDescriptor:
    if cfg.budget is not None:
        return ModulusDescriptor.holder(cfg.budget["mu"], cfg.budget["alpha"])
    if f.holder is not None:
        return ModulusDescriptor.holder(*f.holder)
    radii = [2.0**-j for j in range(12, -1, -1)] + [math.sqrt(f.d)]
    return estimate_modulus(f, sorted(set(radii)), 20_000, cfg.seed)


def _build(cfg: RunConfig):
    f = cfg.target_function()
    params = cfg.hyperparams()
    if cfg.mode == "linf":
        net = extend_linf(f, params)
    else:
        net = assemble(f, params)
    return f, params, net


def _manifest(cfg: RunConfig, params: Hyperparams) -> dict:
    return {
        # output location is excluded so reruns elsewhere stay byte-identical
        "config": {k: v for k, v in asdict(cfg).items() if k != "out"},
        "hyperparams": {"d": params.d, "N": params.N, "M": params.M, "delta": params.delta,
                        "p": params.p if math.isfinite(params.p) else "inf", "n1": params.n1},
        "mode": cfg.mode,
        "target": cfg.target,
    }


def cmd_synthesize(cfg: RunConfig) -> int:
    f, params, net = _build(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    doc = save_network(net, out / WEIGHTS_FILE, _manifest(cfg, params))
    (out / MANIFEST_FILE).write_text(json.dumps(doc["manifest"], indent=1, sort_keys=True) + "\n")
    man = doc["manifest"]
    print(f"wrote {out / WEIGHTS_FILE}: depth={man['depth']} width={man['width']} "
          f"N={params.N} M={params.M} delta={params.delta:.6g}")
    return EXIT_OK


def _params_from_weights(net, man: dict) -> Hyperparams:
    """Hyperparameters from the checksummed structure tags (p from the manifest)."""
    tags = net.structure_tags or {}
    if tags.get("kind") not in ("phi", "phi_linf"):
        raise IntegrityError("weight file does not carry an assembled network")
    delta = float(tags["outer_delta"] if tags["kind"] == "phi_linf" else tags["delta"])
    hp = man.get("hyperparams", {})
    p = hp.get("p", 1.0)
    p = math.inf if p == "inf" else float(p)
    params = Hyperparams(int(tags["d"]), int(tags["N"]), int(tags["M"]), delta, p)
    if hp and (hp.get("N"), hp.get("M"), hp.get("delta")) != (params.N, params.M, params.delta):
        raise IntegrityError("manifest hyperparameters disagree with the network tags")
    return params


def _range_report(f, net, params, n, seed) -> ErrorReport:
    tags = net.structure_tags
    X = np.random.default_rng(seed + 1).random((n, params.d))
    phi = forward(net, X, "exact")
    lo, hi = float(tags["f_lo"]), float(tags["f_hi"])
    excess = max(0.0, lo - float(phi.min()), float(phi.max()) - hi)
    return ErrorReport("range", excess, 1e-9, bool(excess <= 1e-9), n_samples=n, seed=seed + 1,
                       details={"phi_min": float(phi.min()), "phi_max": float(phi.max()),
                                "f_lo": lo, "f_hi": hi})


def _write_samples(path: Path, rep: ErrorReport, d: int):
    s = rep.samples
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x{i + 1}" for i in range(d)] + ["f", "phi", "abs_err", "in_omega"])
    for r in range(s["x"].shape[0]):
        w.writerow([repr(float(v)) for v in s["x"][r]]
                   + [repr(float(s["f"][r])), repr(float(s["phi"][r])),
                      repr(float(s["abs_err"][r])), int(bool(s["in_omega"][r]))])
    path.write_text(buf.getvalue())


def cmd_verify(cfg: RunConfig, weights: str | None) -> int:
    wpath = Path(weights) if weights else Path(cfg.out) / WEIGHTS_FILE
    net, man = load_network(wpath)
    params = _params_from_weights(net, man)
    f = cfg.target_function()
    table = sample_digits(f, params if cfg.mode != "linf" else params.replace(delta=params.delta / 2))
    if table.checksum() != man.get("digit_checksum"):
        raise IntegrityError("digit table of the configured target does not match the weight file")
    mod = _modulus_for(cfg, f)
    reports: list[ErrorReport] = []
    if cfg.mode == "linf":
        main = check_linf_bound(f, net, params, mod, cfg.grid if params.d == 1 else min(cfg.grid, 401),
                                table)
        reports.append(main)
    else:
        main = check_pointwise_bound(f, net, params, mod, cfg.grid if params.d == 1 else min(cfg.grid, 201),
                                     table)
        reports.append(main)
        if cfg.mode == "lp":
            lp = check_lp_bound(f, net, params, mod, cfg.samples, cfg.seed, params.p, table)
            reports.append(lp)
            main = lp
    reports.append(_range_report(f, net, params, min(cfg.samples, 100_000), cfg.seed))
    if cfg.budget is not None:
        eps = float(cfg.budget["epsilon"])
        m = main.lp_err_estimate if main.check == "lp" else main.measured
        se = main.lp_stderr or 0.0
        ok = (m - 3 * se <= eps) if main.check == "lp" else (m <= eps + 1e-8)
        reports.append(ErrorReport("epsilon", m, eps, bool(ok), advisory=main.advisory,
                                   n_samples=main.n_samples, seed=main.seed))
    passed = all(r.passed for r in reports if not r.advisory)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    body = {
        "passed": passed,
        "weights_checksum": man["checksum"],
        "hyperparams": man["hyperparams"],
        "modulus": asdict(mod),
        "reports": [r.to_dict() for r in reports],
    }
    (out / REPORT_FILE).write_text(json.dumps(body, indent=1, sort_keys=True) + "\n")
    _write_samples(out / SAMPLES_FILE, main, params.d)
    for r in reports:
        tag = "advisory" if r.advisory else ("PASS" if r.passed else "FAIL")
        print(f"{r.check:10s} measured={r.measured:.6g} bound={r.theoretical_bound:.6g} [{tag}]")
    return EXIT_OK if passed else EXIT_FAILED


def read_points(path: str, d: int) -> np.ndarray:
    pts = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = [float(v) for v in line.split(",")]
            except ValueError as exc:
                raise ConfigError(f"{path}: line {lineno}: {exc}") from exc
            if len(row) != d:
                raise ConfigError(f"{path}: line {lineno}: expected {d} values, got {len(row)}")
            if any(not (0.0 <= v <= 1.0) for v in row):
                raise ConfigError(f"{path}: line {lineno}: point outside [0,1]^{d}")
            pts.append(row)
    return np.array(pts, dtype=np.float64).reshape(-1, d)


def cmd_eval(weights: str, points: str, path: str, out: str | None) -> int:
    net, _ = load_network(weights)
    X = read_points(points, net.input_dim)
    res = forward_detailed(net, X, path)
    lines = []
    for v, over in zip(res.values[:, 0], res.overflow):
        lines.append(f"{float(v)!r} (overflow)" if over else repr(float(v)))
    text = "\n".join(lines) + ("\n" if lines else "")
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_report(report: str) -> int:
    try:
        body = json.loads(Path(report).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read report: {exc}") from exc
    hp = body["hyperparams"]
    print(f"hyperparams: d={hp['d']} N={hp['N']} M={hp['M']} delta={hp['delta']} p={hp['p']}")
    for r in body["reports"]:
        tag = "advisory" if r["advisory"] else ("PASS" if r["passed"] else "FAIL")
        line = f"  {r['check']:10s} measured={r['measured']:.6g} bound={r['theoretical_bound']:.6g}"
        if r.get("lp_stderr") is not None:
            line += f" stderr={r['lp_stderr']:.3g}"
        print(line + f" [{tag}]")
    print("overall:", "PASS" if body["passed"] else "FAIL")
    return EXIT_OK if body["passed"] else EXIT_FAILED


# -------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sinebits", description=__doc__.split("\n")[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def config_flags(p):
        p.add_argument("--config", help="JSON run config")
        p.add_argument("--set", action="append", default=[], metavar="K=V",
                       help="override a config key (dotted keys reach into budget/target_params)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int)
        p.add_argument("--samples", type=int)
        p.add_argument("--grid", type=int)

    config_flags(sub.add_parser("synthesize", help="build a network and write weights + manifest"))
    pv = sub.add_parser("verify", help="check a weight file against its error bounds")
    config_flags(pv)
    pv.add_argument("--weights", help="weight file (default: <out>/weights.json)")
    pe = sub.add_parser("eval", help="evaluate a weight file on a points CSV")
    pe.add_argument("weights")
    pe.add_argument("points")
    pe.add_argument("--path", choices=("exact", "float"), default="exact")
    pe.add_argument("--out", help="write values here instead of stdout")
    pr = sub.add_parser("report", help="summarise a report JSON")
    pr.add_argument("report")
    return ap


def _config_from_args(args) -> RunConfig:
    overrides = list(args.set)
    for key in ("out", "seed", "samples", "grid"):
        val = getattr(args, key)
        if val is not None:
            overrides.append(f"{key}={json.dumps(val)}")
    return load_config(args.config, overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synthesize":
            return cmd_synthesize(_config_from_args(args))
        if args.command == "verify":
            return cmd_verify(_config_from_args(args), args.weights)
        if args.command == "eval":
            return cmd_eval(args.weights, args.points, args.path, args.out)
        return cmd_report(args.report)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except IntegrityError as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except CapabilityError as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
