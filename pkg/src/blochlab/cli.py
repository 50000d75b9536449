"""Batch front-end: run experiments described by a JSON config and write a JSON report plus CSV side files.

Usage::

    blochlab <command> --config exp.json [--seed N] [--out DIR] [--task NAME ...]

Commands: norms, operator, classify, testfn, probe, report. ``report`` runs
the tasks listed in the config (or those given with ``--task``).

Exit codes: 0 on success, 2 when a checked property is violated, 1 on
input errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import bloch, cesaro, testfuncs
from .holo import PolyFunction, SelfMap, function_dictionary
from .sampling import SamplerConfig, ball_points
from .weights import r_mu_constant, weight_from_config

log = logging.getLogger("blochlab")

TASKS = ("norms", "bounded", "compact", "testfn", "probe", "factorization")
COMMAND_TASKS = {
    "norms": ("norms",),
    "operator": ("factorization",),
    "classify": ("bounded", "compact"),
    "testfn": ("testfn",),
    "probe": ("probe",),
    "report": None,
}

DEFAULT_TOLERANCES = {
    "norm_chain_slack": 0.02,
    "growth": 1e-8,
    "identity_rtol": 1e-8,
    "two_path_atol": 1e-6,
    "factorization": 1e-10,
    "testfn_slack": 0.02,
}

_TERM = {
    "type": "object",
    "properties": {
        "exponents": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "re": {"type": "number"},
        "im": {"type": "number"},
    },
    "required": ["exponents"],
    "additionalProperties": False,
}
_POLY = {"type": "array", "items": _TERM}
_WEIGHT = {
    "type": "object",
    "properties": {
        "family": {"enum": ["power", "table"]},
        "alpha": {"type": "number", "exclusiveMinimum": 0},
        "delta": {"type": "number", "minimum": 0, "maximum": 1},
        "knots": {"type": "array", "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}},
        "exponent_a": {"type": "number"},
        "exponent_b": {"type": "number"},
        "integral_divergent": {"type": "boolean"},
        "tail_monotone_from": {"type": "number"},
    },
    "required": ["family"],
}

SCHEMA = {
    "type": "object",
    "properties": {
        "dimension": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0},
        "weights": {
            "type": "object",
            "properties": {"mu": _WEIGHT, "nu": _WEIGHT},
            "required": ["mu"],
        },
        "psi": _POLY,
        "phi": {"oneOf": [{"enum": ["identity", "counterexample"]}, {"type": "array", "items": _POLY}]},
        "functions": {"type": "array", "items": _POLY},
        "dictionary": {
            "type": "object",
            "properties": {"size": {"type": "integer", "minimum": 1}, "max_degree": {"type": "integer", "minimum": 1}},
        },
        "sampler": {
            "type": "object",
            "properties": {
                "shells": {"type": "integer", "minimum": 1},
                "directions": {"type": "integer", "minimum": 1},
                "refinement_passes": {"type": "integer", "minimum": 0},
                "refine_top": {"type": "integer", "minimum": 1},
            },
        },
        "tolerances": {"type": "object", "additionalProperties": {"type": "number"}},
        "tasks": {"type": "array", "items": {"enum": list(TASKS)}},
        "testfn": {
            "type": "object",
            "properties": {
                "w_norms": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}},
                "k_max": {"type": "integer", "minimum": 8},
            },
        },
        "probe": {
            "type": "object",
            "properties": {
                "radius": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "eps": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "samples": {"type": "integer", "minimum": 0},
                "counterexample_points": {"type": "boolean"},
            },
        },
        "factorization": {"type": "object", "properties": {"k": {"type": "integer", "minimum": 1}}},
    },
    "required": ["dimension", "weights"],
}


class ConfigError(ValueError):
    pass


def load_config(path: Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    validate_config(cfg)
    return cfg


def validate_config(cfg: dict) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        lines = [f"  at '{'/'.join(str(p) for p in e.absolute_path) or '<root>'}': {e.message}" for e in errors]
        raise ConfigError("config does not match the schema:\n" + "\n".join(lines))
    m = cfg["dimension"]
    for name, poly in [("psi", cfg.get("psi"))] + [(f"functions/{i}", p) for i, p in enumerate(cfg.get("functions", []))]:
        if poly is not None:
            _check_poly_dim(poly, m, name)
    if isinstance(cfg.get("phi"), list):
        if len(cfg["phi"]) != m:
            raise ConfigError(f"at 'phi': {len(cfg['phi'])} components for dimension {m}")
        for i, comp in enumerate(cfg["phi"]):
            _check_poly_dim(comp, m, f"phi/{i}")


def _check_poly_dim(terms, m, where):
    for j, t in enumerate(terms):
        if len(t["exponents"]) != m:
            raise ConfigError(f"at '{where}/{j}/exponents': length {len(t['exponents'])}, expected {m}")


def _poly(terms, m) -> PolyFunction:
    return PolyFunction.from_json(terms, dim=m)


def _phi(cfg: dict, seed: int) -> SelfMap:
    m = cfg["dimension"]
    spec = cfg.get("phi", "identity")
    if spec == "identity":
        return SelfMap.identity(m)
    if spec == "counterexample":
        return cesaro.counterexample_map(m)
    return SelfMap.certify([_poly(c, m) for c in spec], seed=seed)


def _sampler(cfg: dict, seed: int) -> SamplerConfig:
    return SamplerConfig.from_dict({**cfg.get("sampler", {}), "seed": seed})


class Runner:
    """Executes tasks for one config and collects the report document."""

    def __init__(self, cfg: dict, seed: int, out: Path):
        self.cfg = cfg
        self.seed = seed
        self.out = out
        self.m = cfg["dimension"]
        self.tol = {**DEFAULT_TOLERANCES, **cfg.get("tolerances", {})}
        self.sampler = _sampler(cfg, seed)
        self.mu = weight_from_config(cfg["weights"]["mu"])
        self.nu = weight_from_config(cfg["weights"].get("nu", cfg["weights"]["mu"]))
        self.violations: list[str] = []
        self.files: list[str] = []

    # helpers

    def _functions(self) -> list[PolyFunction]:
        if "functions" in self.cfg:
            return [_poly(t, self.m) for t in self.cfg["functions"]]
        if "psi" in self.cfg:
            return [_poly(self.cfg["psi"], self.m)]
        d = self.cfg.get("dictionary", {})
        return function_dictionary(self.m, d.get("size", 8), self.seed, d.get("max_degree", 4))

    def _spec(self) -> cesaro.OperatorSpec:
        if "psi" not in self.cfg:
            raise ConfigError("at 'psi': required for operator tasks")
        return cesaro.OperatorSpec(_poly(self.cfg["psi"], self.m), _phi(self.cfg, self.seed), self.nu, self.mu)

    def _csv(self, name: str, header, rows) -> None:
        path = self.out / name
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in rows:
                w.writerow([repr(v) if isinstance(v, float) else v for v in row])
        self.files.append(name)

    def _flag(self, message: str) -> None:
        log.warning("property violation: %s", message)
        self.violations.append(message)

    # tasks

    def norms(self) -> dict:
        out = []
        r_mu = r_mu_constant(self.mu)
        for i, f in enumerate(self._functions()):
            chain = bloch.norm_chain(f, self.mu, self.sampler)
            entry = {
                "function": f.to_json(),
                "seminorms": {"radial": chain.radial, "gradient": chain.gradient, "affine": chain.affine},
                "norms": chain.norms,
            }
            if self.mu.is_standard:
                inv = bloch.seminorm(f, self.mu, "invariant", self.sampler).value
                entry["seminorms"]["invariant"] = inv
            bound = 2.0 * np.sqrt(2.0) * r_mu * chain.norms["affine"] * (1.0 + self.tol["norm_chain_slack"])
            ok = chain.norms["radial"] <= chain.norms["gradient"] <= bound
            entry["norm_chain"] = {"passed": bool(ok), "upper_bound": bound}
            if not ok:
                self._flag(f"norm chain fails for function {i}")
            growth = bloch.growth_check(f, self.mu, 1000, self.sampler, self.seed, self.tol["growth"])
            entry["growth"] = {"passed": growth.passed, "worst_slack": growth.worst_slack}
            if not growth.passed:
                self._flag(f"growth estimate fails for function {i}")
            profile = bloch.decay_profile(f, self.mu, seed=self.seed)
            entry["little_bloch"] = profile.tends_to_zero()
            name = f"profile_norms_{i}.csv"
            self._csv(name, ["radius", "value"], zip(profile.radii.tolist(), profile.values.tolist()))
            entry["profile_csv"] = name
            out.append(entry)
        return {"r_mu": r_mu, "functions": out}

    def bounded(self) -> dict:
        spec = self._spec()
        report = cesaro.classify_boundedness(spec, self.sampler)
        self._csv("profile_bounded.csv", ["radius", "value"],
                  zip(report.decay.radii.tolist(), report.decay.values.tolist()))
        return report.to_dict()

    def compact(self) -> dict:
        spec = self._spec()
        report = cesaro.classify_compactness(spec, self.sampler)
        if report.decay is not None:
            self._csv("profile_compact.csv", ["radius", "value"],
                      zip(report.decay.radii.tolist(), report.decay.values.tolist()))
        return report.to_dict()

    def testfn(self) -> dict:
        opts = self.cfg.get("testfn", {})
        series = testfuncs.build_g(self.nu, opts.get("k_max"))
        consts = testfuncs.constants(series)
        slack = 1.0 + self.tol["testfn_slack"]
        rng = np.random.default_rng(self.seed)
        rows = []
        for wn in opts.get("w_norms", [0.3, 0.6, 0.9]):
            d = rng.standard_normal(self.m) + 1j * rng.standard_normal(self.m)
            w = wn * d / np.linalg.norm(d)
            b = bloch.bloch_norm(testfuncs.BetaFunction(series, w), self.nu, "radial", self.sampler)
            g = bloch.bloch_norm(testfuncs.GammaFunction(series, w), self.nu, "radial", self.sampler)
            ok = b <= consts.C2 * slack and g <= 2 * consts.C2 * slack
            if not ok:
                self._flag(f"test-function norm bound fails at ||w|| = {wn}")
            rows.append({"w_norm": wn, "beta_norm": b, "gamma_norm": g, "passed": bool(ok)})
        return {"series": series.summary(), "constants": consts.to_dict(), "norms": rows}

    def probe(self) -> dict:
        opts = self.cfg.get("probe", {})
        phi = _phi(self.cfg, self.seed)
        pts = None
        if opts.get("counterexample_points", self.cfg.get("phi") == "counterexample"):
            pts = cesaro.counterexample_points(self.m)
        result = cesaro.epsnet_probe(
            phi, opts.get("radius", 0.5), opts.get("eps", 0.3), opts.get("samples", 0 if pts is not None else 2000),
            self.seed, pts,
        )
        out = {"net_size": result.size, "points_considered": result.points_considered}
        if pts is not None:
            dists = cesaro.pairwise_distances(phi(pts))
            self._csv("probe.csv", ["i", "j", "distance"], dists)
            out["distances_csv"] = "probe.csv"
            out["distance_range"] = [min(d for *_, d in dists), max(d for *_, d in dists)] if dists else None
        return out

    def factorization(self) -> dict:
        spec = self._spec()
        k = self.cfg.get("factorization", {}).get("k", 2)
        rng = np.random.default_rng(self.seed)
        out = []
        for i, f in enumerate(self._functions()):
            image = cesaro.apply_exact(spec, f)
            ident = cesaro.radial_identity_check(spec, f, seed=self.seed, rtol=self.tol["identity_rtol"], image=image)
            z = 0.95 * ball_points(rng, 20, self.m)
            two_path = float(np.max(np.abs(cesaro.apply_quadrature(spec, f, z) - image(z))))
            fact = cesaro.weak_factorization_check(spec, f, k, seed=self.seed, tol=self.tol["factorization"])
            ok = ident.passed and two_path <= self.tol["two_path_atol"] and fact.passed
            if not ok:
                self._flag(f"operator identities fail for function {i}")
            out.append({
                "image": image.to_json(),
                "radial_identity": {"passed": ident.passed, "worst_relative_error": ident.worst_relative_error},
                "two_path_error": two_path,
                "factorization": {"passed": fact.passed, "worst_error": fact.worst_error, "dim_Y": fact.dim_y},
            })
        return {"functions": out}


def run(cfg: dict, tasks, seed: int, out: Path) -> tuple[dict, int]:
    """Run ``tasks`` and write ``report.json`` into ``out``; returns (document, exit code)."""
    out.mkdir(parents=True, exist_ok=True)
    runner = Runner(cfg, seed, out)
    doc = {
        "seed": seed,
        "dimension": cfg["dimension"],
        "tasks": list(tasks),
        "tolerances": runner.tol,
        "sampler": {k: v for k, v in runner.sampler.__dict__.items() if k != "interior_radii"},
        "results": {},
    }
    for task in tasks:
        log.info("running %s", task)
        doc["results"][task] = getattr(runner, task)()
    doc["violations"] = runner.violations
    doc["files"] = runner.files
    (out / "report.json").write_text(json.dumps(doc, indent=2, sort_keys=True, default=_json_default))
    return doc, (2 if runner.violations else 0)


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blochlab", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMAND_TASKS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
        p.add_argument("--out", type=Path, default=Path("blochlab-out"))
        p.add_argument("--task", action="append", choices=TASKS, default=None)
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.task:
        tasks = args.task
    elif COMMAND_TASKS[args.command] is not None:
        tasks = list(COMMAND_TASKS[args.command])
    else:
        tasks = cfg.get("tasks", [])
    if not tasks:
        parser.print_usage(sys.stderr)
        print("error: no tasks to run (give --task or list tasks in the config)", file=sys.stderr)
        return 1
    seed = args.seed if args.seed is not None else cfg.get("seed")
    if seed is None:
        print("error: a seed is required (config 'seed' or --seed)", file=sys.stderr)
        return 1
    try:
        doc, code = run(cfg, tasks, seed, args.out)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps({"report": str(args.out / "report.json"), "violations": len(doc["violations"])}))
    return code


if __name__ == "__main__":
    sys.exit(main())
