"""Command-line front end.

Exit codes: 0 success (fat and consistent for ``check-triple``), 1 not fat
or unexpected table failures, 2 inconclusive or integration diverged,
3 usage or lookup error.

Settings come from flags, then an optional ``--config`` file (section
``[fatsub]``), then defaults.  ``FATSUB_OUTPUT_DIR`` additionally writes
each report to ``<dir>/<command>.<ext>``.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__, cheeger, classify, dualfol, fatness, holonomy, liealg
from .errors import FatsubError, IntegrationDiverged, InvalidArgument
from .submersion import HomogeneousTriple, make_triple, vertizontal_sec

EXIT_OK, EXIT_NOT_FAT, EXIT_INCONCLUSIVE, EXIT_ERROR = 0, 1, 2, 3
OUTPUT_DIR_ENV = "FATSUB_OUTPUT_DIR"
FORMATS = ("text", "json", "csv")
WHICH = {
    "ziller": "ziller-A",
    "symmetric-fiber": "symmetric-fiber-B",
    "berard-bergery": "berard-bergery-C",
    "table-a": "table-A",
    "table-b": "table-B",
    "all": None,
}


@dataclass
class RunConfig:
    tolerance: float = fatness.DEFAULT_TOLERANCE
    grid_density: int = fatness.DEFAULT_GRID
    refine_iters: int = fatness.DEFAULT_REFINE
    ode_step: float = 1e-3
    horizon: float = 10.0
    output: str = "text"
    seed: int = 0

    def __post_init__(self):
        if self.output not in FORMATS:
            raise InvalidArgument(f"output must be one of {FORMATS}")
        for name in ("tolerance", "grid_density", "ode_step", "horizon"):
            if not getattr(self, name) > 0:
                raise InvalidArgument(f"{name} must be positive")
        if self.refine_iters < 0:
            raise InvalidArgument("refine_iters must be non-negative")


_CASTS = {"tolerance": float, "grid_density": int, "refine_iters": int, "ode_step": float,
          "horizon": float, "output": str, "seed": int}


def load_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        parser = configparser.ConfigParser()
        if not parser.read(args.config):
            raise InvalidArgument(f"cannot read config file {args.config!r}")
        if parser.has_section("fatsub"):
            for key, raw in parser.items("fatsub"):
                key = key.replace("-", "_")
                if key not in _CASTS:
                    raise InvalidArgument(f"unknown config key {key!r}")
                values[key] = _CASTS[key](raw)
    for key in _CASTS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return RunConfig(**values)


# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------


def _triple_info(t: HomogeneousTriple, g: str, h: str, k: str) -> dict:
    return {"g": g, "h": h, "k": k, "dim_m": t.dm, "dim_p": t.dp, "dim_k": t.dk}


def _envelope(command: str, cfg: RunConfig, code: int, result: dict, error: str | None = None) -> dict:
    out = {"command": command, "version": __version__, "seed": cfg.seed, "config": asdict(cfg),
           "exit_code": code, "result": result}
    if error is not None:
        out["error"] = error
    return out


def _to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _write_csv(header, rows, seed: int, footer: list[str] | None = None) -> str:
    buf = io.StringIO()
    buf.write(f"# seed={seed}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    for line in footer or []:
        buf.write(f"# {line}\n")
    return buf.getvalue()


def _flatten(d: dict, prefix: str = "") -> list[tuple[str, object]]:
    out = []
    for k in sorted(d):
        v = d[k]
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out += _flatten(v, key + ".")
        elif isinstance(v, list):
            out.append((key, " ".join(str(x) for x in v)))
        else:
            out.append((key, v))
    return out


def _emit(command: str, cfg: RunConfig, report: dict, text: str | None = None,
          csv_text: str | None = None, stream=None) -> None:
    stream = stream or sys.stdout
    if cfg.output == "json":
        body, ext = _to_json(report), "json"
    elif cfg.output == "csv":
        if csv_text is None:
            csv_text = _write_csv(["key", "value"], _flatten(report["result"]), cfg.seed)
        body, ext = csv_text, "csv"
    else:
        body = f"# fatsub {command} seed={cfg.seed}\n" + (text or "")
        ext = "txt"
    stream.write(body)
    out_dir = os.environ.get(OUTPUT_DIR_ENV)
    if out_dir:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / f"{command}.{ext}").write_text(body)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_check_triple(args, cfg: RunConfig):
    t = make_triple(args.g, args.h, args.k)
    kw = dict(grid_density=cfg.grid_density, refine_iters=cfg.refine_iters, tolerance=cfg.tolerance)
    two = fatness.fatness_margin(t, **kw)
    dual = fatness.fatness_via_astar(t, **kw)
    cons = fatness.check_dimensional_constraints(t.dp, t.dm)
    span = dualfol.bracket_closure(t)
    aspan = dualfol.a_span(t)
    agree = two.verdict == dual.verdict
    consistent = agree
    if two.verdict == fatness.FAT:
        consistent = agree and cons.overall and span.twisted and aspan.dim == t.dp
    if not agree or two.verdict == fatness.INCONCLUSIVE:
        code = EXIT_INCONCLUSIVE
    elif two.verdict == fatness.FAT:
        code = EXIT_OK if consistent else EXIT_INCONCLUSIVE
    else:
        code = EXIT_NOT_FAT
    result = {
        "triple": _triple_info(t, args.g, args.h, args.k),
        "fatness": two.to_dict(),
        "fatness_dual": dual.to_dict(),
        "constraints": cons.to_dict(),
        "span": span.to_dict(),
        "a_span_dim": aspan.dim,
        "consistent": bool(consistent),
    }
    lines = [
        f"triple ({args.g}, {args.h}, {args.k}): dim m={t.dm} dim p={t.dp} dim k={t.dk}",
        f"fatness (two-form): {two.verdict} margin={two.margin:.6g}" + (f" reason: {two.reason}" if two.reason else ""),
        f"fatness (dual map): {dual.verdict} margin={dual.margin:.6g}" + (f" reason: {dual.reason}" if dual.reason else ""),
        f"dimensional constraints: {cons.detail}",
        f"bracket closure dims: {span.depth_dims} twisted={span.twisted}",
        f"A-span dim: {aspan.dim} of {t.dp}",
        f"consistent: {consistent}",
    ]
    return code, result, "\n".join(lines) + "\n", None


def cmd_tables(args, cfg: RunConfig):
    tid = WHICH[args.which]
    verdicts = classify.verify_tables(tid)
    expected = classify.load_expected_flags()
    got = {(v.key, c) for v in verdicts for c in v.failures()}
    keys = {v.key for v in verdicts}
    unexpected = sorted(f"{k} {c}" for k, c in got - expected)
    missing = sorted(f"{k} {c}" for k, c in expected - got if k in keys)
    rows = []
    for v in verdicts:
        d = v.to_dict()
        d["expected_flags"] = sorted(c for k, c in expected if k == v.key)
        rows.append(d)
    code = EXIT_OK if not unexpected and not missing else EXIT_NOT_FAT
    result = {"which": args.which, "rows": rows, "unexpected_failures": unexpected, "missing_flags": missing}
    text = classify.format_verdicts(verdicts)
    text += f"unexpected failures: {len(unexpected)}; expected flags not raised: {len(missing)}\n"
    for line in unexpected:
        text += f"  unexpected: {line}\n"
    for line in missing:
        text += f"  missing: {line}\n"
    header = ["key", "table_id"] + list(classify.CHECKS) + ["margin", "notes"]
    csv_text = _write_csv(header, [[r[h] if r.get(h) is not None else "" for h in header] for r in rows], cfg.seed)
    return code, result, text, csv_text


def _parse_ts(raw: str) -> list[float]:
    try:
        ts = [float(x) for x in raw.split(",") if x.strip()]
    except ValueError as exc:
        raise InvalidArgument(f"bad t list {raw!r}") from exc
    if not ts:
        raise InvalidArgument("t list is empty")
    return ts


def _unit_rows(rng, n, dim):
    v = rng.normal(size=(n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def cmd_deform(args, cfg: RunConfig):
    t = make_triple(args.g, args.h, args.k)
    if t.dm == 0 or t.dp == 0:
        raise InvalidArgument("deformation sweep needs dim m > 0 and dim p > 0")
    ts = _parse_ts(args.t)
    rng = np.random.default_rng(cfg.seed)
    Xs, Vs = _unit_rows(rng, args.samples, t.dm), _unit_rows(rng, args.samples, t.dp)
    eye = np.eye(t.dp)
    rows = []
    for s in ts:
        kmin = min(cheeger.deformed_vertizontal_sec(t, s, X, V) for X, V in zip(Xs, Vs))
        Ot = cheeger.deform(eye, s)
        G = cheeger.qt_gram(eye, eye, s, t.dm)
        rows.append({"t": s, "min_vertizontal": kmin, "min_eig_O_t": float(np.linalg.eigvalsh(Ot).min()),
                     "qt_residual": float(np.abs(G - np.eye(len(G))).max())})
    result = {"triple": _triple_info(t, args.g, args.h, args.k), "samples": args.samples, "rows": rows}
    header = ["t", "min_vertizontal", "min_eig_O_t", "qt_residual"]
    csv_text = _write_csv(header, [[r[h] for h in header] for r in rows], cfg.seed)
    base = min(vertizontal_sec(t, X, V) for X, V in zip(Xs, Vs))
    text = f"undeformed min vertizontal curvature {base:.6g}\n" + "\n".join(
        f"t={r['t']:<10g} min K={r['min_vertizontal']:.6g} min eig O_t={r['min_eig_O_t']:.6g} "
        f"Q_t residual={r['qt_residual']:.3g}" for r in rows) + "\n"
    return EXIT_OK, result, text, csv_text


def _random_shape(rng, dim, norm):
    if norm == 0 or dim == 0:
        return None
    A = rng.normal(size=(dim, dim))
    S = A + A.T
    return S * (norm / np.linalg.norm(S, 2))


def cmd_holonomy(args, cfg: RunConfig):
    t = make_triple(args.g, args.h, args.k)
    if not 0 <= args.x_index < t.dm or not 0 <= args.xi_index < t.dp:
        raise InvalidArgument(f"indices must satisfy 0 <= x < {t.dm} and 0 <= xi < {t.dp}")
    X = np.eye(t.dm)[args.x_index]
    xi0 = args.xi_scale * np.eye(t.dp)[args.xi_index]
    spec = holonomy.GeodesicSpec(X, cfg.horizon, cfg.ode_step)
    S = _random_shape(np.random.default_rng(cfg.seed), t.dp, args.shape_norm)
    xi = holonomy.integrate_holonomy(t, spec, xi0, S)
    nu = holonomy.integrate_dual_holonomy(t, spec, xi0, S)
    pairing = np.einsum("ni,ni->n", xi.values, nu.values)
    pairing_drift = float(np.abs(pairing - pairing[0]).max())
    norm_drift = float(np.ptp(xi.norms))
    stride = max(1, spec.nsteps // 100)
    samples = [[float(xi.times[i])] + [float(x) for x in xi.values[i]] for i in range(0, len(xi.times), stride)]
    csv_path = None
    if args.csv:
        csv_path = str(args.csv)
        holonomy.write_trajectory_csv(csv_path, xi, t, X, nu)
    result = {"triple": _triple_info(t, args.g, args.h, args.k), "x_index": args.x_index,
              "xi_index": args.xi_index, "pairing_drift": pairing_drift, "norm_drift": norm_drift,
              "csv_path": csv_path, "samples": samples}
    A = fatness.astar_matrix(t, X)
    header = ["t"] + [f"v{i}" for i in range(t.dp)] + ["a_star_norm", "pairing"]
    csv_rows = [[xi.times[i]] + list(xi.values[i]) + [float(np.linalg.norm(0.5 * A @ xi.values[i])), pairing[i]]
                for i in range(0, len(xi.times), stride)]
    summary = f"summary pairing_drift={pairing_drift:.3e} norm_drift={norm_drift:.3e}"
    csv_text = _write_csv(header, csv_rows, cfg.seed, [summary])
    text = (f"holonomy field along exp(t e_{args.x_index}) from {args.xi_scale:g} e_{args.xi_index}, "
            f"horizon {cfg.horizon:g}, step {cfg.ode_step:g}\n"
            f"final |xi| = {xi.norms[-1]:.12g}\n{summary}\n")
    return EXIT_OK, result, text, csv_text


def cmd_dualfol(args, cfg: RunConfig):
    t = make_triple(args.g, args.h, args.k)
    span = dualfol.bracket_closure(t)
    aspan = dualfol.a_span(t)
    fat = t.dp >= 1 and t.dm >= 2 and fatness.fatness_margin(
        t, cfg.grid_density, cfg.refine_iters, cfg.tolerance).is_fat
    ok = dualfol.ambrose_singer_check(t, fat)
    result = {"triple": _triple_info(t, args.g, args.h, args.k), "span": span.to_dict(),
              "a_span_dim": aspan.dim, "ambrose_singer": ok}
    text = (f"bracket closure dims: {span.depth_dims} (saturated at depth {span.saturated_at})\n"
            f"twisted: {span.twisted}\nA-span dim: {aspan.dim} of {t.dp}\nbasepoint span identity: {ok}\n")
    return EXIT_OK, result, text, None


def cmd_catalog(args, cfg: RunConfig):
    entries = [{"name": r.name, "dim": r.dim, "rank": r.rank, "realizable": r.realizable}
               for r in liealg.catalog_records().values()]
    text = "\n".join(f"{e['name']:<10} dim {e['dim']:>4}  rank {e['rank']:>2}  "
                     f"{'matrix' if e['realizable'] else 'arithmetic only'}" for e in entries) + "\n"
    header = ["name", "dim", "rank", "realizable"]
    csv_text = _write_csv(header, [[e[h] for h in header] for e in entries], cfg.seed)
    return EXIT_OK, {"entries": entries}, text, csv_text


COMMANDS = {
    "check-triple": cmd_check_triple,
    "tables": cmd_tables,
    "deform": cmd_deform,
    "holonomy": cmd_holonomy,
    "dualfol": cmd_dualfol,
    "catalog": cmd_catalog,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with a [fatsub] section")
    common.add_argument("--tolerance", type=float)
    common.add_argument("--grid-density", dest="grid_density", type=int)
    common.add_argument("--refine-iters", dest="refine_iters", type=int)
    common.add_argument("--ode-step", dest="ode_step", type=float)
    common.add_argument("--horizon", type=float)
    common.add_argument("--output", choices=FORMATS)
    common.add_argument("--seed", type=int)

    triple = argparse.ArgumentParser(add_help=False)
    triple.add_argument("--g", required=True, help="ambient algebra, e.g. sp2 or su2+su2")
    triple.add_argument("--h", required=True, help="subalgebra token, e.g. sp1xsp1")
    triple.add_argument("--k", default="e", help="isotropy token inside g (default e)")

    p = argparse.ArgumentParser(prog="fatsub", description="Fat submersions over matrix Lie algebras.")
    p.add_argument("--version", action="version", version=f"fatsub {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("check-triple", parents=[common, triple], help="fatness and consistency of a triple")
    tp = sub.add_parser("tables", parents=[common], help="verify the classification tables")
    tp.add_argument("--which", choices=sorted(WHICH), default="all")
    dp = sub.add_parser("deform", parents=[common, triple], help="Cheeger deformation sweep")
    dp.add_argument("--t", default="0,0.1,1,10,100", help="comma separated parameters")
    dp.add_argument("--samples", type=int, default=500)
    hp = sub.add_parser("holonomy", parents=[common, triple], help="holonomy and dual-holonomy run")
    hp.add_argument("--x-index", dest="x_index", type=int, default=0)
    hp.add_argument("--xi-index", dest="xi_index", type=int, default=0)
    hp.add_argument("--xi-scale", dest="xi_scale", type=float, default=1.0)
    hp.add_argument("--shape-norm", dest="shape_norm", type=float, default=0.0,
                    help="operator norm of a random symmetric shape operator (0 = totally geodesic)")
    hp.add_argument("--csv", type=Path, help="write the full trajectory here")
    sub.add_parser("dualfol", parents=[common, triple], help="dual-foliation report")
    sub.add_parser("catalog", parents=[common], help="list catalog entries")
    return p


def main(argv=None, stream=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    stream = stream or sys.stdout
    try:
        cfg = load_config(args)
    except (FatsubError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        code, result, text, csv_text = COMMANDS[args.command](args, cfg)
    except IntegrationDiverged as exc:
        code, result, text, csv_text, err = EXIT_INCONCLUSIVE, {}, None, None, str(exc)
    except (FatsubError, ValueError, KeyError) as exc:
        code, result, text, csv_text, err = EXIT_ERROR, {}, None, None, str(exc)
    else:
        err = None
    if err is not None:
        print(f"error: {err}", file=sys.stderr)
        if cfg.output != "json":
            return code
    _emit(args.command, cfg, _envelope(args.command, cfg, code, result, err), text, csv_text, stream)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
