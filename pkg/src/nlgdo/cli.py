"""
Command-line driver.

    nlgdo spectrum     --config run.json --out results/
    nlgdo localize     --config run.json --out results/
    nlgdo separable    --config run.json --out results/
    nlgdo check-pseudo --config run.json --out results/
    nlgdo bench        [--config run.json] --out results/

Every run writes one CSV per table plus ``manifest.json`` holding the
normalized config, library versions, the grid digest and per-table row
counts.  Floats are written with 17 significant digits and rows in a fixed
order, so identical configs give byte-identical files.

Exit codes: 0 success, 2 config error, 3 numerical failure (or a failed
acceptance check under ``bench``), 4 mapping breakdown at every requested k.

The environment variable ``NLGDO_SEED`` is reserved; nothing in this version
is stochastic and it is ignored.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import logging
import platform
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np
import scipy

from . import __version__, benchmarks, feff, kernels, localization, partner, separable
from .kernels import Convolution, LocalDiagonal, PhysParams, SeparableRank1
from .numerics import RULES, EigenSolverError, FullLine, HalfLine, make_grid
from .profiles import FAMILIES, profile_from_config

log = logging.getLogger("nlgdo")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_BREAKDOWN = 0, 2, 3, 4

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_cnum = {"oneOf": [_num, {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}]}
_components = {"type": "array", "items": {"enum": [1, 2]}, "minItems": 1, "uniqueItems": True}

PROFILE_SCHEMA = {
    "type": "object",
    "required": ["family"],
    "properties": {
        "family": {"enum": sorted(FAMILIES)},
        "value": _cnum, "slope": _cnum, "amplitude": _cnum,
        "a": _num, "depth": _num, "width": _num, "start": _num,
    },
    "additionalProperties": False,
}

SCHEMA = {
    "type": "object",
    "required": ["kernel", "grid"],
    "additionalProperties": False,
    "properties": {
        "kernel": {
            "type": "object",
            "required": ["type"],
            "additionalProperties": False,
            "properties": {
                "type": {"enum": ["local", "separable", "convolution"]},
                "profile": PROFILE_SCHEMA,
                "lam": _cnum,
                "form": PROFILE_SCHEMA,
                "background": PROFILE_SCHEMA,
            },
        },
        "params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"hbar": _pos, "m": _pos, "c": _pos,
                           "omega": {"type": "number", "minimum": 0}, "theta": _num},
        },
        "grid": {
            "type": "object",
            "required": ["domain", "L", "n"],
            "additionalProperties": False,
            "properties": {
                "domain": {"enum": ["half", "full"]},
                "L": _pos,
                "n": {"type": "integer", "minimum": 8},
                "rule": {"enum": list(RULES)},
            },
        },
        "levels": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_max": {"type": "integer", "minimum": 0},
                "components": _components,
                "order": {"type": "integer", "minimum": 2},
                "tol_abs": _pos, "tol_rel": _pos,
                "momenta": {"type": "array", "items": {"type": "integer"}},
            },
        },
        "localize": {
            "type": "object",
            "required": ["k"],
            "additionalProperties": False,
            "properties": {
                "k": {"type": "array", "items": _pos, "minItems": 1},
                "zero_tol": _pos, "decay_tol": _pos, "compat_tol": _pos, "sigma_tol": _pos,
            },
        },
        "separable": {
            "type": "object",
            "required": ["lam", "k_range"],
            "additionalProperties": False,
            "properties": {
                "lam": {"oneOf": [_num, {"type": "array", "items": _num, "minItems": 1}]},
                "a": _pos,
                "components": _components,
                "k_range": {"type": "array", "items": _pos, "minItems": 2, "maxItems": 2},
                "nk": {"type": "integer", "minimum": 16},
                "bc": {"enum": list(separable.BCS)},
                "root_tol": _pos, "zero_tol": _pos,
            },
        },
        "pseudo": {
            "type": "object",
            "required": ["theta"],
            "additionalProperties": False,
            "properties": {
                "theta": {"type": "array", "items": _num, "minItems": 1},
                "n_levels": {"type": "integer", "minimum": 1},
                "tol": _pos,
            },
        },
        "bench": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"criteria": {"type": "array", "items": {"type": "integer", "minimum": 1,
                                                                    "maximum": 10}}},
        },
    },
}

DEFAULTS = {
    "params": {"hbar": 1.0, "m": 1.0, "c": 1.0, "omega": 1.0, "theta": 0.0},
    "grid": {"rule": "gauss_legendre"},
    "levels": {"n_max": 5, "components": [1, 2], "order": partner.FD_ORDER, "tol_abs": 1e-8, "tol_rel": 1e-6},
    "localize": {"zero_tol": 1e-6, "decay_tol": 1e-10, "compat_tol": 1e-4, "sigma_tol": 1e-8},
    "separable": {"a": 1.0, "components": [1, 2], "nk": 64, "bc": "dirichlet", "root_tol": 1e-6,
                  "zero_tol": 1e-6},
    "pseudo": {"n_levels": 6, "tol": 1e-6},
}

TASK_BLOCK = {"spectrum": "levels", "localize": "localize", "separable": "separable",
              "check-pseudo": "pseudo", "bench": "bench"}


class ConfigError(ValueError):
    pass


def _line_of(text, path):
    """Best-effort 1-based line of the JSON node addressed by ``path``."""
    pos = 0
    for key in path:
        if isinstance(key, str):
            hit = text.find(json.dumps(key), pos)
            if hit < 0:
                break
            pos = hit
    return text.count("\n", 0, pos) + 1


def _normalize(cfg):
    out = copy.deepcopy(cfg)
    for block, defaults in DEFAULTS.items():
        if block in out or block in ("params", "grid"):
            out[block] = {**defaults, **out.get(block, {})}
    return out


@dataclass
class RunConfig:
    kernel: dict
    params: PhysParams
    grid: dict
    blocks: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, cfg, text=None):
        text = json.dumps(cfg, indent=2) if text is None else text
        errors = sorted(jsonschema.Draft202012Validator(SCHEMA).iter_errors(cfg), key=lambda e: list(e.path))
        if errors:
            e = errors[0]
            where = "/".join(str(p) for p in e.path) or "<root>"
            path = list(e.path)
            if e.validator == "additionalProperties":
                # point at the offending key rather than its parent block
                extra = sorted(set(e.instance) - set(e.schema.get("properties", {})))
                path += extra[:1]
            raise ConfigError(f"line {_line_of(text, path)}: {where}: {e.message}")
        cfg = _normalize(cfg)
        try:
            params = PhysParams(**cfg["params"])
        except ValueError as exc:
            raise ConfigError(f"line {_line_of(text, ['params'])}: params: {exc}") from None
        blocks = {k: v for k, v in cfg.items() if k not in ("kernel", "params", "grid")}
        return cls(kernel=cfg["kernel"], params=params, grid=cfg["grid"], blocks=blocks)

    @classmethod
    def from_text(cls, text):
        try:
            cfg = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from None
        return cls.from_dict(cfg, text)

    def to_dict(self):
        p = self.params
        d = {"kernel": self.kernel,
             "params": {"hbar": p.hbar, "m": p.m, "c": p.c, "omega": p.omega, "theta": p.theta},
             "grid": self.grid}
        d.update(self.blocks)
        return copy.deepcopy(d)

    def block(self, name):
        if name not in self.blocks:
            raise ConfigError(f"config has no '{name}' block")
        return self.blocks[name]

    def make_grid(self):
        g = self.grid
        dom = HalfLine(g["L"]) if g["domain"] == "half" else FullLine(g["L"])
        return make_grid(dom, g["n"], g["rule"])

    def make_kernel(self):
        k = self.kernel
        try:
            if k["type"] in ("local", "convolution"):
                if "profile" not in k:
                    raise ConfigError(f"{k['type']} kernel needs a 'profile'")
                prof = profile_from_config(k["profile"])
                return LocalDiagonal(prof) if k["type"] == "local" else Convolution(prof)
            if "lam" not in k or "form" not in k:
                raise ConfigError("separable kernel needs 'lam' and 'form'")
            lam = k["lam"]
            lam = complex(*lam) if isinstance(lam, list) else float(lam)
            bg = profile_from_config(k["background"]) if "background" in k else None
            return SeparableRank1(lam, profile_from_config(k["form"]), bg)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"kernel: {exc}") from None


@dataclass
class ResultBundle:
    metadata: dict
    tables: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    exit_code: int = EXIT_OK

    def add(self, name, columns, rows):
        for r in rows:
            if len(r) != len(columns):
                raise ValueError(f"table {name}: row of length {len(r)} for {len(columns)} columns")
        self.tables[name] = (list(columns), [list(r) for r in rows])

    def write(self, out):
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        listing = {}
        for name in sorted(self.tables):
            cols, rows = self.tables[name]
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(cols)
            for r in rows:
                w.writerow([_fmt(v) for v in r])
            (out / f"{name}.csv").write_text(buf.getvalue())
            listing[name] = {"file": f"{name}.csv", "rows": len(rows), "columns": cols}
        manifest = {**self.metadata, "tables": listing, "diagnostics": _jsonable(self.diagnostics),
                    "exit_code": self.exit_code}
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [format(obj.real, ".17g"), format(obj.imag, ".17g")]
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g")
    return obj


def _metadata(rc, task, grid=None):
    meta = {
        "task": task,
        "config": rc.to_dict(),
        "versions": {"nlgdo": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "python": platform.python_version()},
    }
    if grid is not None:
        meta["grid"] = {"digest": grid.digest(), "n": grid.n, "rule": grid.rule}
    return meta


def _ri(z):
    z = complex(z)
    return [z.real, z.imag]


# tasks ---------------------------------------------------------------------------


def cmd_spectrum(rc, threads=1):
    g = rc.make_grid()
    f = rc.make_kernel()
    lv = rc.block("levels")
    P = rc.params
    pair = partner.build_partners(f, P, g)
    n = lv["n_max"] + 1
    bundle = ResultBundle(_metadata(rc, "spectrum", g))
    ref = None
    if isinstance(f, LocalDiagonal) and f.profile.family in ("linear", "linear_shifted"):
        ref = benchmarks.oscillator_levels(P.replace(omega=float(np.real(f.profile.slope)) / P.m), lv["n_max"])

    def run(j):
        return partner.spectrum(pair, j, n_levels=n, tol_abs=lv["tol_abs"], tol_rel=lv["tol_rel"],
                                order=lv["order"])

    with ThreadPoolExecutor(max_workers=threads) as ex:
        results = list(ex.map(run, lv["components"]))
    for j, res in zip(lv["components"], results):
        cols = ["n", "re_eps", "im_eps", "re_E_plus", "im_E_plus", "real"]
        rows = []
        for i in range(n):
            row = [i, *_ri(res.epsilons[i]), *_ri(res.energies_plus[i]), bool(res.reality_flags[i])]
            if ref is not None:
                row.append(ref[i].eps_minus if j == 1 else ref[i].eps_plus)
            rows.append(row)
        if ref is not None:
            cols.append("benchmark_eps")
        bundle.add(f"spectrum_j{j}", cols, rows)
        bundle.diagnostics[f"all_real_j{j}"] = res.all_real
    if isinstance(f, Convolution) and g.periodic:
        H = partner.component_hamiltonian(pair, 2, order=lv["order"])
        L = g.domain.L
        ms = lv.get("momenta") or list(range(-5, 6))
        rows = []
        for m in ms:
            q = m * np.pi / L
            v = np.exp(1j * q * g.nodes)
            lam = np.mean((H @ v) / v)
            rows.append([m, q, lam.real, lam.imag, benchmarks.convolution_dispersion(f.profile, q, P.hbar).eps])
        bundle.add("dispersion", ["m", "q", "re_eps_grid", "im_eps_grid", "eps_reference"], rows)
    return bundle


def _localize_one(pair, k, g, blk, hbar):
    out = {"k": k}
    res = {}
    for j in (1, 2):
        V = pair.component(j)
        try:
            jp = localization.solve_jost(V, k, g, hbar=hbar, decay_tol=blk["decay_tol"])
            res[j] = localization.equivalent_potential(jp, V, hbar=hbar, zero_tol=blk["zero_tol"])
        except localization.JostSolveError as exc:
            out[f"error_{j}"] = str(exc)
            res[j] = None
    out["res"] = res
    if res[1] is not None and res[2] is not None and res[1].valid and res[2].valid:
        try:
            out["compat"] = feff.compatibility(hbar ** 2 * res[1].Ueq, hbar ** 2 * res[2].Ueq, hbar, g,
                                               compat_tol=blk["compat_tol"], sigma_tol=blk["sigma_tol"])
        except ValueError as exc:
            out["compat_error"] = str(exc)
    return out


def cmd_localize(rc, threads=1):
    g = rc.make_grid()
    if g.domain.kind != "half":
        raise ConfigError("localize runs on a half-line grid")
    f = rc.make_kernel()
    blk = rc.block("localize")
    P = rc.params
    pair = partner.build_partners(f, P, g)
    # reject kernels that have not decayed before doing any per-k work
    for j in (1, 2):
        localization.match_radius(pair.component(j), g, P.hbar, blk["decay_tol"])
    bundle = ResultBundle(_metadata(rc, "localize", g))
    ks = list(blk["k"])
    with ThreadPoolExecutor(max_workers=threads) as ex:
        outs = list(ex.map(lambda k: _localize_one(pair, k, g, blk, P.hbar), ks))
    summary = []
    any_valid = False
    nan = float("nan")
    for idx, o in enumerate(outs):
        r1, r2 = o["res"][1], o["res"][2]
        cmp_ = o.get("compat")
        valid = [r is not None and r.valid for r in (r1, r2)]
        any_valid |= all(valid)
        summary.append([idx, o["k"],
                        r1.min_abs_current if r1 is not None else nan, valid[0],
                        r2.min_abs_current if r2 is not None else nan, valid[1],
                        bool(cmp_.compatible) if cmp_ is not None else False,
                        cmp_.max_residual if cmp_ is not None else nan])
        rows = []
        for i, x in enumerate(g.nodes):
            row = [x]
            for r in (r1, r2):
                if r is None:
                    row += [nan] * 6
                else:
                    row += [*_ri(r.J[i]), *_ri(r.A[i]), *_ri(r.Ueq[i])]
            if cmp_ is not None:
                row += [*_ri(cmp_.Sigma[i]), *_ri(cmp_.Delta[i]), *_ri(cmp_.feff[i]), cmp_.residual[i]]
            else:
                row += [nan] * 7
            rows.append(row)
        cols = ["x"]
        for j in (1, 2):
            cols += [f"re_J{j}", f"im_J{j}", f"re_A{j}", f"im_A{j}", f"re_Ueq{j}", f"im_Ueq{j}"]
        cols += ["re_Sigma", "im_Sigma", "re_Delta", "im_Delta", "re_feff", "im_feff", "compat_residual"]
        bundle.add(f"localize_k{idx:03d}", cols, rows)
        for key in ("error_1", "error_2", "compat_error"):
            if key in o:
                bundle.diagnostics.setdefault(f"k{idx:03d}", {})[key] = o[key]
    bundle.add("localize_summary",
               ["index", "k", "min_abs_J1", "valid1", "min_abs_J2", "valid2", "compatible", "compat_residual"],
               summary)
    if not any_valid:
        bundle.exit_code = EXIT_BREAKDOWN
    return bundle


def cmd_separable(rc, threads=1):
    g = rc.make_grid()
    if g.domain.kind != "half" or g.rule != "gauss_legendre":
        raise ConfigError("separable runs on a gauss_legendre half-line grid")
    blk = rc.block("separable")
    P = rc.params
    lams = blk["lam"] if isinstance(blk["lam"], list) else [blk["lam"]]
    u = profile_from_config({"family": "gaussian", "a": blk["a"]})
    tasks = [(float(lam), j) for lam in lams for j in blk["components"]]

    def run(t):
        lam, j = t
        return separable.spurious_scan(lam, u, j, blk["k_range"], blk["nk"], g, bc=blk["bc"], hbar=P.hbar,
                                       root_tol=blk["root_tol"])

    with ThreadPoolExecutor(max_workers=threads) as ex:
        scans = list(ex.map(run, tasks))
    bundle = ResultBundle(_metadata(rc, "separable", g))
    det_rows, root_rows, min_rows = [], [], []
    for (lam, j), s in zip(tasks, scans):
        for k, d in zip(s.k, s.det):
            det_rows.append([lam, j, k, d.real, d.imag])
        for k, d in s.minima:
            min_rows.append([lam, j, k, d])
        for k, d in s.roots:
            pair = partner.build_partners(SeparableRank1(lam, u), P, g)
            V = pair.component(j)
            try:
                jp = localization.solve_jost(V, k, g, hbar=P.hbar)
                mj = localization.equivalent_potential(jp, V, hbar=P.hbar,
                                                       zero_tol=blk["zero_tol"]).min_abs_current
            except localization.JostSolveError:
                mj = 0.0
            root_rows.append([lam, j, k, d, mj])
    bundle.add("det_scan", ["lam", "j", "k", "re_det", "im_det"], det_rows)
    bundle.add("det_minima", ["lam", "j", "k_star", "abs_det"], min_rows)
    bundle.add("roots", ["lam", "j", "k_star", "abs_det", "min_abs_J"], root_rows)
    bundle.diagnostics["n_roots"] = len(root_rows)
    return bundle


def cmd_check_pseudo(rc, threads=1):
    g = rc.make_grid()
    f = rc.make_kernel()
    blk = rc.block("pseudo")
    P = rc.params
    pair = partner.build_partners(f, P, g)
    fractions = {}
    for j in (1, 2):
        res = partner.spectrum(pair, j, n_levels=blk["n_levels"], tol_abs=blk["tol"], tol_rel=0.0)
        fractions[j] = float(np.mean(res.reality_flags))

    def run(theta):
        try:
            return kernels.shift_residual(f, P.replace(theta=float(theta)), g)
        except kernels.UnsupportedRepresentationError as exc:
            raise ConfigError(str(exc)) from None

    with ThreadPoolExecutor(max_workers=threads) as ex:
        resid = list(ex.map(run, blk["theta"]))
    bundle = ResultBundle(_metadata(rc, "check-pseudo", g))
    bundle.add("pseudo", ["theta", "residual", "real_fraction_j1", "real_fraction_j2"],
               [[float(t), r, fractions[1], fractions[2]] for t, r in zip(blk["theta"], resid)])
    return bundle


def cmd_bench(rc, threads=1):
    from . import acceptance

    numbers = None
    if rc is not None and "bench" in rc.blocks:
        numbers = rc.blocks["bench"].get("criteria")
    outcomes = acceptance.run_all(numbers)
    meta = {"task": "bench", "config": rc.to_dict() if rc is not None else None,
            "versions": {"nlgdo": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                         "python": platform.python_version()}}
    bundle = ResultBundle(meta)
    bundle.add("acceptance", ["criterion", "title", "passed", "summary"],
               [[o.number, o.title, o.passed, o.summary] for o in outcomes])
    for o in outcomes:
        print(o.line())
    if not all(o.passed for o in outcomes):
        bundle.exit_code = EXIT_NUMERIC
    return bundle


COMMANDS = {"spectrum": cmd_spectrum, "localize": cmd_localize, "separable": cmd_separable,
            "check-pseudo": cmd_check_pseudo, "bench": cmd_bench}


def build_parser():
    p = argparse.ArgumentParser(prog="nlgdo", description="Nonlocal generalized Dirac oscillator toolkit")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", type=Path, help="JSON run configuration")
    p.add_argument("--out", type=Path, default=Path("nlgdo-out"), help="output directory")
    p.add_argument("--threads", type=int, default=1, help="worker threads for per-k / per-theta tasks")
    p.add_argument("--verbose", action="store_true")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        rc = None
        if args.config is not None:
            rc = RunConfig.from_text(args.config.read_text())
        elif args.command != "bench":
            raise ConfigError("--config is required")
        if rc is not None and args.command != "bench" and TASK_BLOCK[args.command] not in rc.blocks:
            raise ConfigError(f"config has no '{TASK_BLOCK[args.command]}' block")
        log.info("running %s", args.command)
        bundle = COMMANDS[args.command](rc, threads=args.threads)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except localization.KernelNotDecayedError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EigenSolverError, localization.JostSolveError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    bundle.write(args.out)
    log.info("wrote %d tables to %s", len(bundle.tables), args.out)
    return bundle.exit_code


if __name__ == "__main__":
    sys.exit(main())
