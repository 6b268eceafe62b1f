import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ksband.config import RunConfig, config_hash, load_config, parse_config, serialize_config
from ksband.errors import ConfigError


def test_minimal_config_fills_defaults():
    cfg = parse_config('[symbol]\nfamily = "KuramotoSivashinsky1D"\n')
    assert cfg == RunConfig()
    assert cfg.grid.n == 256 and cfg.integrator.h == 0.01
    assert parse_config("") == RunConfig()


def test_negative_step_named():
    with pytest.raises(ConfigError) as info:
        parse_config("[integrator]\nh = -0.1\n")
    assert any("integrator.h" in p and "> 0" in p for p in info.value.problems)


def test_topper_kawahara_alpha3():
    text = '[grid]\nd = 2\n[symbol]\nfamily = "TopperKawahara2D"\n[symbol.params]\nalpha3 = 0.0\n'
    with pytest.raises(ConfigError, match="alpha3 > 0"):
        parse_config(text)


def test_unknown_keys_and_sections_rejected():
    with pytest.raises(ConfigError) as info:
        parse_config("[grid]\nN = 64\n[integrater]\nh = 0.1\n[integrator]\nh = -1\n")
    probs = info.value.problems
    assert any("grid.N" in p for p in probs)
    assert any("integrater" in p for p in probs)
    assert any("integrator.h" in p for p in probs)


@pytest.mark.parametrize("text,field", [
    ("[grid]\nn = 100\n", "grid.n"),
    ("[grid]\nd = 3\n", "grid.d"),
    ("[grid]\nL = 0.0\n", "grid.L"),
    ("[integrator]\nT = -1.0\n", "integrator.T"),
    ("[integrator]\nseed = 1.5\n", "integrator.seed"),
    ("[diagnostics]\nwindow_fraction = 0.0\n", "window_fraction"),
    ("[diagnostics]\nwindow_fraction = 1.5\n", "window_fraction"),
    ("[integrator]\nh = nan\n", "integrator.h"),
    ("[integrator]\nT = inf\n", "integrator.T"),
    ('[symbol]\nfamily = "Pinto2D"\n', "symbol.family"),
    ('[symbol]\nfamily = "Nope"\n', "symbol.family"),
    ('[symbol]\nfamily = "GeneralizedGamma"\n[symbol.params]\ngamma = "x"\n', "symbol.params.gamma"),
    ('[output]\nformats = ["xml"]\n', "output.formats"),
    ("[grid]\nn = \n", "TOML"),
])
def test_field_errors(text, field):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert field in str(info.value)


def test_all_problems_reported_together():
    with pytest.raises(ConfigError) as info:
        parse_config("[grid]\nn = 'x'\n[integrator]\nh = 0.0\nT = -2.0\n")
    assert len(info.value.problems) == 3


@given(n=st.sampled_from([8, 64, 512]), L=st.floats(0.1, 1e3), h=st.floats(1e-5, 1.0),
       T=st.floats(0, 1e4), seed=st.integers(0, 2**63), gammas=st.lists(st.floats(0.1, 10), max_size=5),
       fam=st.sampled_from(["KuramotoSivashinsky1D", "GeneralizedGamma"]))
def test_roundtrip(n, L, h, T, seed, gammas, fam):
    params = {"gamma": 1.7, "mu_tilde": 0.5} if fam == "GeneralizedGamma" else {}
    cfg = RunConfig().replace(grid={"n": n, "L": L}, integrator={"h": h, "T": T, "seed": seed},
                              symbol={"family": fam, "params": params}, sweep={"gammas": gammas})
    again = parse_config(serialize_config(cfg))
    assert again == cfg
    assert config_hash(again) == config_hash(cfg)


def test_hash_changes_with_content():
    assert config_hash(RunConfig()) != config_hash(RunConfig().replace(integrator={"seed": 1}))


def test_load_config(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text("[grid]\nL = %r\n" % (8 * math.pi))
    assert load_config(p).make_grid().q == pytest.approx(0.25)
    assert load_config(p).make_symbol().q == pytest.approx(0.25)
