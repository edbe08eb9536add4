"""Text specs for graphs, samplers, series and campaign config files.

Graph specs are a family name followed by ``key=value`` tokens::

    cycle n=200
    lcf name=foster
    lcf jumps=5,-5 exponent=7
    cayley p=5 gens=standard
    cayley p=7 gens=1,1,0,1;1,-1,0,1;1,0,1,1;1,0,-1,1

A campaign config is an INI file::

    [campaign]
    graph = lcf name=foster
    sampler = permvec
    base_vector = 1.2247448713915890,0,-1.2247448713915890   ; optional
    samples = 10000
    seed = 1
    override_gate = false
    eps = 0.1,0.01                                          ; optional m_eps sweep
    threads = 1

    [functions]
    z2 = 0,0,1
    sq_z = squared: 0,1
"""

import configparser
import shlex

import numpy as np

from .errors import InvalidArgument
from .graphs import (LcfCode, build_cayley, build_cycle, build_lcf,
                     standard_generators)


def _tokens(spec):
    parts = shlex.split(spec)
    if not parts:
        raise InvalidArgument("empty graph spec")
    family, params = parts[0].lower(), {}
    for tok in parts[1:]:
        if "=" not in tok:
            raise InvalidArgument(f"expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        params[k.strip().lower()] = v.strip()
    return family, params


def parse_floats(text):
    return [float(x) for x in str(text).replace(" ", "").split(",") if x]


def parse_generators(text):
    if text in (None, "", "standard"):
        return standard_generators()
    mats = []
    for chunk in text.split(";"):
        vals = [int(x) for x in chunk.split(",")]
        if len(vals) != 4:
            raise InvalidArgument(f"generator {chunk!r} needs 4 entries")
        mats.append([vals[:2], vals[2:]])
    return mats


def build_graph(family, **params):
    family = family.lower()
    if family == "cycle":
        return build_cycle(int(params["n"]))
    if family == "lcf":
        if "name" in params:
            return build_lcf(params["name"])
        jumps = tuple(int(x) for x in str(params["jumps"]).split(","))
        code = LcfCode(jumps, int(params.get("exponent", 1)),
                       str(params.get("vertex_transitive", "false")).lower() == "true")
        return build_lcf(code)
    if family == "cayley":
        return build_cayley(int(params["p"]), parse_generators(params.get("gens")))
    raise InvalidArgument(f"unknown graph family {family!r}")


def parse_graph_spec(spec):
    family, params = _tokens(spec)
    try:
        return build_graph(family, **params)
    except KeyError as exc:
        raise InvalidArgument(f"graph spec {spec!r} is missing {exc}") from None


def parse_series(text):
    """``"0,0,1"`` -> z^2.  A ``squared:`` prefix is handled by the caller."""
    from .functionals import PowerSeries
    coeffs = parse_floats(text)
    if not coeffs:
        raise InvalidArgument(f"no coefficients in {text!r}")
    return PowerSeries(np.array(coeffs))


def parse_function_entry(name, text):
    from .experiments import FunctionSpec
    text = text.strip()
    squared = False
    if text.lower().startswith("squared:"):
        squared, text = True, text.split(":", 1)[1]
    return FunctionSpec(name, parse_series(text), squared)


def _bool(text):
    return str(text).strip().lower() in ("1", "true", "yes", "on")


def load_campaign_config(path):
    from .experiments import ExperimentConfig
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    with open(path) as fh:
        parser.read_file(fh)
    if "campaign" not in parser:
        raise InvalidArgument(f"{path}: missing [campaign] section")
    c = parser["campaign"]
    if "functions" not in parser or not parser["functions"]:
        raise InvalidArgument(f"{path}: missing or empty [functions] section")
    funcs = [parse_function_entry(k, v) for k, v in parser["functions"].items()]
    base = c.get("base_vector")
    return ExperimentConfig(
        graph=c["graph"],
        sampler=c.get("sampler", "antisym"),
        base_vector=parse_floats(base) if base else None,
        functions=funcs,
        samples=int(c.get("samples", 10000)),
        seed=int(c.get("seed", 0)),
        eps=parse_floats(c["eps"]) if c.get("eps") else (),
        override_gate=_bool(c.get("override_gate", "false")),
        threads=int(c.get("threads", 1)),
    )
