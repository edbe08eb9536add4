"""Command-line entry point ``girthlab``.

JSON goes to stdout (or ``--out``), grids and per-sample dumps are CSV, and
every float is written with 17 significant digits.  When ``--out`` is given a
run manifest ``<out>.manifest.json`` records the version, resolved config,
seed, timing and the sha256 of every output file.

Exit codes: 0 success, 1 domain error (out-of-domain parameters, gate
violations), 2 usage error (bad flags, unreadable config).
"""

import argparse
import hashlib
import io
import logging
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .config import (build_graph, load_campaign_config, parse_floats,
                     parse_graph_spec, parse_series)
from .covariance import AlphaTable, alpha_table, h_form, tree_alpha_table
from .environment import make_sampler, sample
from .errors import GirthlabError, InvalidArgument
from .experiments import run_campaign
from .functionals import m_eps, t_function, tail_bound
from .treeform import (TreeModel, kernel_beta, limit_density,
                       stieltjes_residual)

log = logging.getLogger("girthlab")


class UsageError(Exception):
    pass


# -- serialization ---------------------------------------------------------------

def fmt_float(x):
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def to_json(obj, indent=2, _level=0):
    """JSON with 17-significant-digit floats; NaN becomes null."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{to_json(str(k))}: {to_json(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj.tolist() if isinstance(obj, np.ndarray) else obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(to_json(v, indent, _level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, complex):
        return to_json({"re": obj.real, "im": obj.imag}, indent, _level)
    if isinstance(obj, str):
        import json
        return json.dumps(obj)
    if hasattr(obj, "__dict__"):
        return to_json(vars(obj), indent, _level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def csv_text(header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else fmt_float(v) for v in row) + "\n")
    return buf.getvalue()


class Emitter:
    """Collects outputs of one invocation and writes the manifest."""

    def __init__(self, args):
        self.args = args
        self.files = []

    def write(self, text, path=None):
        path = path or self.args.out
        if path:
            with open(path, "w", newline="") as fh:
                fh.write(text)
            self.files.append(path)
        else:
            sys.stdout.write(text)

    def manifest(self, config, elapsed):
        if not self.files:
            return
        outputs = []
        for p in self.files:
            with open(p, "rb") as fh:
                outputs.append({"path": p, "sha256": hashlib.sha256(fh.read()).hexdigest()})
        doc = {"tool": "girthlab", "version": __version__, "command": self.args.command,
               "config": config, "seed": self.args.seed, "threads": self.args.threads,
               "elapsed_seconds": elapsed, "outputs": outputs}
        with open(self.files[0] + ".manifest.json", "w") as fh:
            fh.write(to_json(doc) + "\n")


# -- helpers ----------------------------------------------------------------------

def _graph_from_args(args):
    if getattr(args, "graph", None):
        return parse_graph_spec(args.graph)
    raise UsageError("--graph is required")


def _sampler(args, g):
    base = parse_floats(args.base_vector) if args.base_vector else None
    return make_sampler(args.sampler, g.d, base)


def _series_arg(text):
    text = text.strip()
    if text.startswith("coeffs="):
        text = text[len("coeffs="):]
    return parse_series(text)


def _number(text):
    try:
        return complex(text.replace(" ", "").replace("i", "j")) if any(
            c in text for c in "ij") else float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _plain(z):
    return z if isinstance(z, float) else complex(z)


# -- subcommands ----------------------------------------------------------------

def cmd_graph(args, out):
    if args.spec:
        g = parse_graph_spec(args.spec)
    elif args.family:
        params = {k: v for k, v in (("n", args.n), ("name", args.name), ("p", args.p),
                                     ("gens", args.gens), ("jumps", args.jumps),
                                     ("exponent", args.exponent)) if v is not None}
        g = build_graph(args.family, **params)
    else:
        raise UsageError("graph needs --family or --spec")
    info = g.info()
    out.write(to_json({"n": info["n"], "d": info["d"], "girth": info["girth"],
                       "name": info["name"], "family": info["family"]}) + "\n")
    return info


def cmd_sample(args, out):
    g = _graph_from_args(args)
    s = _sampler(args, g)
    b = sample(s, g, args.seed)
    rows = [(str(u), str(a), float(v)) for u, r in enumerate(b.entries) for a, v in enumerate(r)]
    out.write(csv_text(["vertex", "slot", "value"], rows))
    return {"graph": args.graph, "sampler": s.label}


def cmd_tfun(args, out):
    g = _graph_from_args(args)
    s = _sampler(args, g)
    f = _series_arg(args.f)
    if args.squared:
        f = f.composed_with_square()
    b = sample(s, g, args.seed)
    doc = {"t": _plain(t_function(g, b, f)), "tail_bound": tail_bound(b, f)}
    if args.eps is not None:
        doc["m_eps"] = _plain(m_eps(g, b, f, args.eps))
        doc["eps"] = args.eps
    out.write(to_json(doc) + "\n")
    return {"graph": args.graph, "sampler": s.label, "f": args.f, "eps": args.eps}


def cmd_alpha(args, out):
    if args.tree is not None:
        s = make_sampler("permvec" if args.tree % 2 else "balanced", args.tree)
        table = tree_alpha_table(args.tree, s, args.imax)
    else:
        g = _graph_from_args(args)
        table = alpha_table(g, _sampler(args, g), cap=args.imax)
    out.write(to_json(table.to_dict()) + "\n")
    return {"graph": args.graph, "tree": args.tree, "imax": args.imax}


def cmd_hform(args, out):
    import json
    try:
        with open(args.table) as fh:
            table = AlphaTable.from_dict(json.load(fh))
    except OSError as exc:
        raise UsageError(f"cannot read alpha table: {exc}") from None
    f, g = _series_arg(args.f), _series_arg(args.g)
    out.write(to_json({"h": h_form(table, f, g)}) + "\n")
    return {"table": args.table, "f": args.f, "g": args.g}


def _open_grid(hi, n):
    # midpoints of n equal cells; avoids the endpoint singularities
    return (np.arange(n) + 0.5) * hi / n


def cmd_kernel_grid(args, out):
    t = TreeModel(args.d)
    xs, ys = _open_grid(t.rho, args.nx), _open_grid(t.rho, args.ny)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    B = kernel_beta(t, X, Y)
    rows = zip(X.ravel(), Y.ravel(), B.ravel())
    out.write(csv_text(["x", "y", "beta"], rows))
    return {"d": args.d, "nx": args.nx, "ny": args.ny}


def cmd_density(args, out):
    t = TreeModel(args.d)
    xs = _open_grid(t.rho, args.nx)
    out.write(csv_text(["x", "density"], zip(xs, limit_density(t, xs))))
    return {"d": args.d, "nx": args.nx}


def cmd_verify(args, out):
    if args.identity != "stieltjes":
        raise UsageError(f"unknown identity {args.identity!r}")
    r = stieltjes_residual(args.d, args.lam, args.mu, tol=args.tol)
    doc = {"identity": "stieltjes", "d": args.d, "lambda": args.lam, "mu": args.mu,
           "residual": r}
    out.write(to_json(doc) + "\n")
    return {"d": args.d, "lambda": args.lam, "mu": args.mu}


def cmd_mc(args, out):
    if not args.config:
        raise UsageError("mc needs --config")
    if not os.path.isfile(args.config):
        raise UsageError(f"config file not found: {args.config}")
    try:
        cfg = load_campaign_config(args.config)
    except (KeyError, ValueError) as exc:
        if isinstance(exc, GirthlabError):
            raise
        raise UsageError(f"bad config {args.config}: {exc}") from None
    if args.seed_given:
        cfg.seed = args.seed
    cfg.threads = args.threads
    if args.override_gate:
        cfg.override_gate = True
    res = run_campaign(cfg)
    out.write(to_json(res.to_dict()) + "\n")
    if args.csv:
        rows = [[str(i)] + list(v) for i, v in enumerate(res.values)]
        out.write(csv_text(["sample"] + res.names, rows), args.csv)
    return res.config


COMMANDS = {"graph": cmd_graph, "sample": cmd_sample, "tfun": cmd_tfun,
            "alpha": cmd_alpha, "hform": cmd_hform, "kernel-grid": cmd_kernel_grid,
            "density": cmd_density, "verify": cmd_verify, "mc": cmd_mc}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="master seed (default 0)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker cap (default $GIRTHLAB_THREADS or 1)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output file")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    def graph_flags(p):
        p.add_argument("--graph", help='graph spec, e.g. "cycle n=200" or "lcf name=foster"')
        p.add_argument("--sampler", default="antisym",
                       help="antisym | antisym-uniform | balanced | permvec")
        p.add_argument("--base-vector", help="comma-separated base vector for permvec")

    parser = argparse.ArgumentParser(prog="girthlab", parents=[common],
                                     description="Spectral noise of random walks in random environments.")
    parser.add_argument("--version", action="version", version=f"girthlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("graph", parents=[common], help="print n, d, girth as JSON")
    p.add_argument("action", nargs="?", choices=["info"], default="info")
    p.add_argument("--family", choices=["cycle", "lcf", "cayley"])
    p.add_argument("--n", type=int)
    p.add_argument("--name")
    p.add_argument("--p", type=int)
    p.add_argument("--gens")
    p.add_argument("--jumps")
    p.add_argument("--exponent", type=int)
    p.add_argument("--spec", help="full graph spec string instead of --family flags")

    p = sub.add_parser("sample", parents=[common], help="export a perturbation as CSV")
    graph_flags(p)

    p = sub.add_parser("tfun", parents=[common], help="T_G(f) for one perturbation")
    graph_flags(p)
    p.add_argument("--f", required=True, help='coefficients, e.g. "coeffs=0,0,1"')
    p.add_argument("--squared", action="store_true", help="apply T to f(z^2)")
    p.add_argument("--eps", type=float)

    p = sub.add_parser("alpha", parents=[common], help="alpha table as JSON")
    graph_flags(p)
    p.add_argument("--imax", type=int, default=8)
    p.add_argument("--tree", type=int, help="use the d-regular tree instead of --graph")

    p = sub.add_parser("hform", parents=[common], help="H(f, g) from an alpha table")
    p.add_argument("--table", required=True, help="JSON written by `alpha`")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)

    p = sub.add_parser("kernel-grid", parents=[common], help="CSV grid of beta_d")
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--nx", type=int, default=200)
    p.add_argument("--ny", type=int, default=200)

    p = sub.add_parser("density", parents=[common], help="CSV of the limiting density")
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--nx", type=int, default=400)

    p = sub.add_parser("verify", parents=[common], help="closed-form identity checks")
    p.add_argument("identity", choices=["stieltjes"])
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=_number, required=True)
    p.add_argument("--mu", type=_number, required=True)
    p.add_argument("--tol", type=float, default=1e-8)

    p = sub.add_parser("mc", parents=[common], help="Monte Carlo campaign from a config")
    p.add_argument("--config")
    p.add_argument("--csv", help="also dump raw per-sample values here")
    p.add_argument("--override-gate", action="store_true")
    return parser


def _threads_default():
    env = os.environ.get("GIRTHLAB_THREADS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        raise UsageError(f"GIRTHLAB_THREADS must be an integer, got {env!r}") from None


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.seed_given = hasattr(args, "seed")
    args.seed = getattr(args, "seed", 0)
    args.out = getattr(args, "out", None)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = Emitter(args)
    try:
        args.threads = getattr(args, "threads", None) or _threads_default()
        start = time.perf_counter()
        config = COMMANDS[args.command](args, out)
        out.manifest(config, time.perf_counter() - start)
    except UsageError as exc:
        print(f"girthlab {args.command}: {exc}", file=sys.stderr)
        return 2
    except (GirthlabError, ArithmeticError) as exc:
        print(f"girthlab {args.command}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # malformed numbers inside specs and coefficient lists
        print(f"girthlab {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
