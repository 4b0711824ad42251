"""Command line front end: gen, dims, params, nets, embed, verify, pipeline, replay.

Each stage reads and writes JSON files in ``--outdir`` (default: the
``MINKEMBED_OUTDIR`` environment variable, else the current directory) and
writes ``manifest-<stage>.json`` echoing the fully resolved configuration.
``replay`` re-runs a manifest with its recorded timestamp, which makes the
outputs byte-identical.

Exit codes: 0 success, 1 invalid input, 2 mathematical failure (JSON
diagnostics on stderr).
"""
import argparse
import json
import logging
import os
import sys
import warnings
from datetime import datetime, timezone

from . import __version__, kernels
from .dimension import (estimate_assouad_spectrum, estimate_minkowski,
                        estimate_quasidoubling_constant)
from .embedding import build_embedding, read_embedding, write_embedding
from .errors import InsufficientScales, MathematicalFailure, ValidationError
from .generators import FAMILIES, GeneratorSpec, gen_space
from .metric_space import normalize_diameter, read_space, write_space
from .nets import NET_ORDERS, build_hierarchy, write_hierarchy
from .params import (DEFAULT_BUDGET_CAP, practical_params, read_params, solve_tau,
                     strict_params)
from .verification import distortion_report, write_report

SCHEMA = 1
log = logging.getLogger("minkembed")

FILES = {"space": "space.json", "dims": "dims.json", "params": "params.json",
         "nets": "nets.json", "embedding": "embedding.json", "report": "report.json",
         "vectors": "vectors.json"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _float_list(text):
    return [float(t) for t in text.split(",") if t.strip()]


# -- argument groups --------------------------------------------------------

def _common(p):
    p.add_argument("--outdir", default=None,
                   help="output directory (default: $MINKEMBED_OUTDIR or .)")
    p.add_argument("--log-level", default="WARNING")
    p.add_argument("--timestamp", default=None,
                   help="fixed build timestamp (replay sets this from the manifest)")
    p.add_argument("--csv", action="store_true", help="also write CSV dumps")


def _gen_args(p, required):
    p.add_argument("--family", choices=FAMILIES, required=required)
    p.add_argument("--size", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--arms", type=int)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)


def _dim_args(p):
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=1.2)
    p.add_argument("--scales", type=_float_list, default=None,
                   help="comma separated Minkowski scale grid")
    p.add_argument("--R-grid", dest="R_grid", type=_float_list, default=None,
                   help="comma separated spectrum / quasidoubling radii")


def _param_args(p):
    p.add_argument("--epsilon", type=float, default=0.75)
    p.add_argument("--C", type=float, default=None,
                   help="quasidoubling constant (default: estimated, or read from --dims)")
    p.add_argument("--dims", default=None, help="dims.json supplying C")
    p.add_argument("--mode", choices=("strict", "practical"), default="strict")
    p.add_argument("--n", type=int, default=None, help="finest level (default n0 + 1)")
    p.add_argument("--tau", type=float, default=None, help="practical mode tau")
    p.add_argument("--M", type=int, default=None, help="practical mode vector dimension")
    p.add_argument("--colors", type=int, default=None,
                   help="practical mode color budget; 0 = greedy count")
    p.add_argument("--grid-step", type=float, default=1e-3)
    p.add_argument("--log-base", type=float, default=None)
    p.add_argument("--budget-cap", type=int, default=DEFAULT_BUDGET_CAP)


def _embed_args(p):
    p.add_argument("--net-order", choices=NET_ORDERS, default="input")
    p.add_argument("--surrogate-threshold", action="store_true")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--dump-vectors", action="store_true")


def build_parser():
    ap = _Parser(prog="minkembed", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a test space")
    _common(p)
    _gen_args(p, required=True)
    p.add_argument("--input", help="base space for snowflake_of")

    p = sub.add_parser("dims", help="dimension and quasidoubling estimates")
    _common(p)
    p.add_argument("--input", required=True)
    _dim_args(p)

    p = sub.add_parser("params", help="resolve embedding parameters")
    _common(p)
    p.add_argument("--input", help="space file; C is estimated from it when --C is absent")
    _dim_args(p)
    _param_args(p)

    p = sub.add_parser("nets", help="build the net hierarchy")
    _common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--params", required=True)
    p.add_argument("--net-order", choices=NET_ORDERS, default="input")

    p = sub.add_parser("embed", help="build the embedding")
    _common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--params", required=True)
    p.add_argument("--seed", type=int, default=0, help="provenance seed stored in metadata")
    _embed_args(p)

    p = sub.add_parser("verify", help="check the distortion bounds")
    _common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--embedding", required=True)
    p.add_argument("--slack", type=float, default=1e-9)

    p = sub.add_parser("pipeline", help="gen (or --input), dims, params, nets, embed, verify")
    _common(p)
    _gen_args(p, required=False)
    p.add_argument("--input")
    _dim_args(p)
    _param_args(p)
    _embed_args(p)
    p.add_argument("--slack", type=float, default=1e-9)

    p = sub.add_parser("replay", help="re-run a manifest")
    p.add_argument("manifest")
    p.add_argument("--outdir", default=None, help="override the recorded output directory")
    p.add_argument("--log-level", default="WARNING")
    return ap


# -- helpers ----------------------------------------------------------------

def _path(cfg, key):
    return os.path.join(cfg["outdir"], FILES[key])


def _dump(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh)
        fh.write("\n")


def _load_space(path):
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    space, scale = normalize_diameter(read_space(path))
    return space, scale


def _resolve(cfg):
    """Absolute input paths and an output directory, so the manifest replays anywhere."""
    if cfg.get("outdir") is None:
        cfg["outdir"] = os.environ.get("MINKEMBED_OUTDIR") or "."
    cfg["outdir"] = os.path.abspath(cfg["outdir"])
    for key in ("input", "params", "embedding", "dims"):
        if cfg.get(key):
            cfg[key] = os.path.abspath(cfg[key])
    if cfg.get("timestamp") is None:
        cfg["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return cfg


def _write_manifest(cfg, outputs):
    man = {"schema": SCHEMA, "version": __version__, "backend": kernels.BACKEND,
           "command": cfg["command"], "timestamp": cfg["timestamp"],
           "config": {k: v for k, v in sorted(cfg.items())}, "outputs": sorted(outputs)}
    _dump(man, os.path.join(cfg["outdir"], f"manifest-{cfg['command']}.json"))


# -- stages -----------------------------------------------------------------

def _stage_gen(cfg):
    spec = GeneratorSpec(cfg["family"], cfg.get("size"), cfg.get("depth"), cfg.get("arms"),
                         cfg.get("seed", 0), cfg.get("alpha", 1.0))
    base = None
    if spec.family == "snowflake_of":
        if not cfg.get("input"):
            raise ValidationError("snowflake_of needs --input")
        base = read_space(_existing(cfg["input"]))
    space = gen_space(spec, base)
    write_space(space, _path(cfg, "space"))
    out = [FILES["space"]]
    if cfg.get("csv"):
        write_space(space, _path(cfg, "space")[:-5] + ".csv")
        out.append("space.csv")
    return space, out


def _existing(path):
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    return path


def _dims_record(space, scale, cfg):
    theta, delta = cfg["theta"], cfg["delta"]
    records = []
    try:
        records.append(estimate_minkowski(space, cfg.get("scales")).to_json())
    except InsufficientScales as e:
        log.warning("minkowski: %s", e)
    try:
        records.append(estimate_assouad_spectrum(space, theta, cfg.get("R_grid")).to_json())
    except InsufficientScales as e:
        log.warning("assouad spectrum: %s", e)
    q = estimate_quasidoubling_constant(space, theta, delta, cfg.get("R_grid"))
    records.append(q.to_json())
    return {"schema": SCHEMA, "normalization_scale": scale, "records": records}, q.C


def _stage_dims(cfg, space=None, scale=None):
    if space is None:
        space, scale = _load_space(cfg["input"])
    rec, C = _dims_record(space, scale, cfg)
    _dump(rec, _path(cfg, "dims"))
    return C, [FILES["dims"]]


def _resolve_C(cfg, space=None):
    if cfg.get("C") is not None:
        return cfg["C"]
    if cfg.get("dims"):
        with open(_existing(cfg["dims"])) as fh:
            recs = json.load(fh)["records"]
        return next(r["value"] for r in recs if r["what"] == "quasidoubling")
    if space is None and cfg.get("input"):
        space, _ = _load_space(cfg["input"])
    if space is None:
        raise ValidationError("give --C, --dims or --input so C can be resolved")
    return estimate_quasidoubling_constant(space, cfg["theta"], cfg["delta"],
                                           cfg.get("R_grid")).C


def _make_params(cfg, C):
    eps, theta, delta = cfg["epsilon"], cfg["theta"], cfg["delta"]
    if cfg["mode"] == "strict":
        return strict_params(eps, theta, delta, C, 0.5, cfg.get("n"), cfg["grid_step"],
                             cfg.get("log_base"), cfg["budget_cap"])
    tau = cfg.get("tau")
    if tau is None:
        tau = solve_tau(eps, theta, delta, C, cfg["grid_step"], cfg.get("log_base"))
    return practical_params(eps, theta, delta, C, tau, 0.5, cfg.get("n"), cfg.get("colors"),
                            cfg.get("M"), cfg["budget_cap"])


def _stage_params(cfg, space=None, C=None):
    if C is None:
        C = _resolve_C(cfg, space)
    p = _make_params(cfg, C)
    _dump(p.to_json(), _path(cfg, "params"))
    return p, [FILES["params"]]


def _warn_redundant(space, p):
    if len(space) > 1 and p.radius(p.n) < space.min_positive_distance:
        log.warning("r_%d = %.3g is below the smallest distance %.3g; finer levels add nothing",
                    p.n, p.radius(p.n), space.min_positive_distance)


def _stage_nets(cfg):
    space, _ = _load_space(cfg["input"])
    p = read_params(_existing(cfg["params"]))
    _warn_redundant(space, p)
    write_hierarchy(build_hierarchy(space, p, cfg["net_order"]), _path(cfg, "nets"))
    return [FILES["nets"]]


def _stage_embed(cfg, space=None, p=None):
    if space is None:
        space, _ = _load_space(cfg["input"])
    if p is None:
        p = read_params(_existing(cfg["params"]))
    _warn_redundant(space, p)
    emb = build_embedding(space, p, cfg["net_order"],
                          "surrogate" if cfg.get("surrogate_threshold") else "direct",
                          cfg.get("threads", 1), cfg["timestamp"], cfg.get("seed"))
    csv_path = _path(cfg, "embedding")[:-5] + ".csv" if cfg.get("csv") else None
    write_embedding(emb, _path(cfg, "embedding"), csv_path)
    out = [FILES["embedding"]] + (["embedding.csv"] if csv_path else [])
    write_hierarchy(emb.hierarchy, _path(cfg, "nets"))
    out.append(FILES["nets"])
    if cfg.get("dump_vectors"):
        _dump(emb.vectors_json(), _path(cfg, "vectors"))
        out.append(FILES["vectors"])
    return emb, out


def _stage_verify(cfg, space=None, emb=None):
    if space is None:
        space, _ = _load_space(cfg["input"])
    if emb is None:
        emb = read_embedding(_existing(cfg["embedding"]))
    rep = distortion_report(space, emb, cfg.get("slack", 1e-9))
    csv_path = _path(cfg, "report")[:-5] + ".csv" if cfg.get("csv") else None
    write_report(rep, _path(cfg, "report"), csv_path)
    log.info("verify: pass=%s worst_upper=%.3g worst_lower=%.3g",
             rep.pass_, rep.worst_upper, rep.worst_lower)
    return rep, [FILES["report"]] + (["report.csv"] if csv_path else [])


def _run_pipeline(cfg):
    outputs = []
    if cfg.get("input"):
        space, scale = _load_space(cfg["input"])
    else:
        if not cfg.get("family"):
            raise ValidationError("pipeline needs --family or --input")
        raw, out = _stage_gen(cfg)
        outputs += out
        space, scale = normalize_diameter(raw)
    C, out = _stage_dims(cfg, space, scale)
    outputs += out
    if cfg.get("C") is not None:
        C = cfg["C"]
    p, out = _stage_params(cfg, space, C)
    outputs += out
    emb, out = _stage_embed(cfg, space, p)
    outputs += out
    rep, out = _stage_verify(cfg, space, emb)
    outputs += out
    return outputs, rep


def execute(cfg):
    """Run one resolved configuration; returns the list of files written."""
    os.makedirs(cfg["outdir"], exist_ok=True)
    cmd = cfg["command"]
    if cmd == "gen":
        _, outputs = _stage_gen(cfg)
    elif cmd == "dims":
        _, outputs = _stage_dims(cfg)
    elif cmd == "params":
        _, outputs = _stage_params(cfg)
    elif cmd == "nets":
        outputs = _stage_nets(cfg)
    elif cmd == "embed":
        _, outputs = _stage_embed(cfg)
    elif cmd == "verify":
        _, outputs = _stage_verify(cfg)
    elif cmd == "pipeline":
        outputs, _ = _run_pipeline(cfg)
    else:
        raise ValidationError(f"unknown command {cmd!r}")
    _write_manifest(cfg, outputs)
    return outputs


def replay(manifest_path, outdir=None):
    with open(_existing(manifest_path)) as fh:
        man = json.load(fh)
    cfg = dict(man["config"])
    if outdir is not None:
        cfg["outdir"] = os.path.abspath(outdir)
    return execute(cfg)


def run(argv=None):
    """Parse ``argv`` and run; returns the process exit code."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 1
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.captureWarnings(True)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            if args.command == "replay":
                outputs = replay(args.manifest, args.outdir)
            else:
                cfg = _resolve({k: v for k, v in vars(args).items() if k != "log_level"})
                outputs = execute(cfg)
    except FileNotFoundError as e:
        print(f"minkembed: no such file: {e.filename or e.args[0]}", file=sys.stderr)
        return 1
    except ValidationError as e:
        print(f"minkembed: invalid input: {e}", file=sys.stderr)
        return 1
    except MathematicalFailure as e:
        print(json.dumps(e.diagnostics(), default=str), file=sys.stderr)
        return 2
    for name in outputs:
        log.info("wrote %s", name)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
