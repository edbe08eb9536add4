import numpy as np
import pytest

from girthlab.config import (load_campaign_config, parse_function_entry,
                             parse_generators, parse_graph_spec, parse_series)
from girthlab.errors import InvalidArgument


@pytest.mark.parametrize("spec,info", [
    ("cycle n=200", (200, 2, 200)),
    ("lcf name=foster", (90, 3, 10)),
    ("lcf jumps=5,-5 exponent=7", (14, 3, 6)),
    ("cayley p=5 gens=standard", (120, 4, 5)),
    ("cayley p=5", (120, 4, 5)),
])
def test_graph_specs(spec, info):
    g = parse_graph_spec(spec)
    assert (g.n, g.d, g.girth) == info


def test_bad_graph_specs():
    for spec in ("", "torus n=4", "cycle", "cycle 200"):
        with pytest.raises(InvalidArgument):
            parse_graph_spec(spec)


def test_explicit_generators():
    gens = parse_generators("1,2,0,1;1,-2,0,1;1,0,2,1;1,0,-2,1")
    g = parse_graph_spec("cayley p=5 gens=1,2,0,1;1,-2,0,1;1,0,2,1;1,0,-2,1")
    assert len(gens) == 4 and g.n == 120
    with pytest.raises(InvalidArgument):
        parse_generators("1,2,3")


def test_series_and_functions():
    np.testing.assert_array_equal(parse_series("0, 0, 1").coeffs, [0, 0, 1])
    f = parse_function_entry("sq", "squared: 0,1")
    assert f.squared and f.expanded.degree == 2
    with pytest.raises(InvalidArgument):
        parse_series(",")


def test_load_config(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("""
[campaign]
graph = lcf name=foster
sampler = permvec
base_vector = 1.2247448713915890,0,-1.2247448713915890   ; default for d=3
samples = 500
seed = 9
eps = 0.1,0.01
override_gate = yes

[functions]
z2 = 0,0,1
sz = squared: 0,1
""")
    cfg = load_campaign_config(path)
    assert cfg.graph == "lcf name=foster" and cfg.samples == 500 and cfg.seed == 9
    assert cfg.override_gate and cfg.eps == [0.1, 0.01]
    assert [f.name for f in cfg.functions] == ["z2", "sz"]
    assert cfg.base_vector[0] == pytest.approx(1.224744871391589)


def test_load_config_errors(tmp_path):
    p = tmp_path / "a.cfg"
    p.write_text("[campaign]\ngraph = cycle n=10\n")
    with pytest.raises(InvalidArgument):
        load_campaign_config(p)
    p.write_text("[functions]\nz = 0,1\n")
    with pytest.raises(InvalidArgument):
        load_campaign_config(p)
