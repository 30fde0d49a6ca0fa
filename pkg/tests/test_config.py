from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from headkin.config import CoraParams, PipelineConfig, config_to_text, load_config, parse_config, write_config
from headkin.errors import InvalidInputError
from headkin.filtering import FilterMode


def test_defaults():
    cfg = PipelineConfig()
    assert (cfg.alpha, cfg.octaves, cfg.voices) == (1.92, 10, 40)
    assert (cfg.threshold, cfg.cap_hz, cfg.trigger_g) == (0.1, 180.0, 3.0)
    assert (cfg.pre_ms, cfg.post_ms, cfg.beta_end_ms) == (50.0, 150.0, 100.0)
    assert cfg.filter_order == 4 and cfg.filter_mode is FilterMode.ZERO_PHASE
    assert cfg.saturation_factor == 0.9
    assert len(cfg.scale_grid) == 400
    assert cfg.window.duration == pytest.approx(0.2)


def test_partial_document_keeps_defaults():
    cfg = parse_config("[pipeline]\ncap_hz = 150\nfilter_mode = causal\n[cora]\ninterval_ms = 80\n")
    assert cfg.cap_hz == 150.0 and cfg.filter_mode is FilterMode.CAUSAL
    assert cfg.cora.interval_ms == 80.0 and cfg.cora.inner_corridor == 0.05
    assert cfg.alpha == 1.92


@pytest.mark.parametrize(
    "text",
    [
        "[pipeline]\nbogus = 1\n",
        "[pipeline]\nfilter_order = 3\n",
        "[pipeline]\nthreshold = abc\n",
        "[pipeline]\nbeta_end_ms = 200\n",
        "[cora]\ninner_corridor = 0.6\n",
        "[cora]\ncorridor_weight = 0.7\n",
    ],
)
def test_invalid_documents(text):
    with pytest.raises(InvalidInputError):
        parse_config(text)


@settings(max_examples=50, deadline=None)
@given(
    cap=st.floats(1, 500),
    threshold=st.floats(0.01, 0.99),
    alpha=st.floats(0.5, 4),
    voices=st.integers(1, 64),
    mode=st.sampled_from(list(FilterMode)),
    inner=st.floats(0, 0.4),
)
def test_text_round_trip(cap, threshold, alpha, voices, mode, inner):
    cfg = replace(
        PipelineConfig(),
        cap_hz=cap,
        threshold=threshold,
        alpha=alpha,
        voices=voices,
        filter_mode=mode,
        cora=replace(CoraParams(), inner_corridor=inner),
    )
    assert parse_config(config_to_text(cfg)) == cfg


def test_file_round_trip(tmp_path):
    cfg = replace(PipelineConfig(), cap_hz=123.456)
    write_config(cfg, tmp_path / "c.ini")
    assert load_config(tmp_path / "c.ini") == cfg
