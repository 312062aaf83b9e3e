import pytest
from hypothesis import given, strategies as st

from digits_toolkit import model_spec as ms
from digits_toolkit.model_spec import LayerKind as K, LayerSpec


@pytest.fixture(params=["dense", "light"])
def spec(request):
    return ms.build_network(request.param)


def tdnnf(spec):
    return [l for l in spec.layers if l.kind is K.TDNNF]


def test_dense_shape():
    s = ms.build_network("dense")
    assert len(tdnnf(s)) == 13
    assert all((l.in_dim, l.out_dim, l.bottleneck) == (1536, 1536, 160) for l in tdnnf(s))


def test_light_shape():
    s = ms.build_network("light")
    assert len(tdnnf(s)) == 4
    assert all(l.out_dim == 1024 for l in tdnnf(s))


def test_inputs_and_heads(spec):
    assert (spec.ivector_dim, spec.raw_dim) == (100, 40)
    assert spec.layers[0].kind is K.AFFINE_LDA
    assert spec.layers[0].in_dim == 3 * 40 + 100
    for branch, layers in spec.branches.items():
        assert [l.kind for l in layers] == [K.PREFINAL, K.OUTPUT_CHAIN if branch == "chain" else K.OUTPUT_XENT]
        assert layers[0].out_dim == 256


def test_dims_chain(spec):
    trunk = spec.trunk
    for a, b in zip(trunk, trunk[1:]):
        assert a.out_dim == b.in_dim
    for layers in spec.branches.values():
        assert layers[0].in_dim == trunk[-1].out_dim


def test_unknown():
    with pytest.raises(ms.UnknownName):
        ms.build_network("tiny")


def test_dense_larger_than_light():
    assert ms.param_count(ms.build_network("dense")) > ms.param_count(ms.build_network("light"))


def test_single_tdnnf_layer_count():
    layer = LayerSpec(K.TDNNF, 1536, 1536, bottleneck=160, time_stride=1)
    # 2*1536*160 = 491520; 160*1536 = 245760; biases 1536 + 160
    assert ms.layer_params(layer) == 491520 + 245760 + 1536 + 160 == 738976


def test_zero_tdnnf_counts_only_affine_layers():
    s = ms.without_tdnnf(ms.build_network("dense"))
    assert s.count(K.TDNNF) == 0
    lda = 220 * 220 + 220
    dense = 220 * 1536 + 1536
    linear = 1536 * 1536
    heads = 2 * (1536 * 256 + 256 + 256 * 1000 + 1000)
    assert ms.param_count(s) == lda + dense + linear + heads


def test_empty_spec_counts_zero():
    assert ms.param_count(ms.NetworkSpec("empty", ())) == 0


def test_totals_are_sums(spec):
    n = spec.count(K.TDNNF)
    tdnnf_params = n * ms.layer_params(tdnnf(spec)[0])
    assert ms.param_count(spec) == ms.param_count(ms.without_tdnnf(spec)) + tdnnf_params


def test_strides_default_schedule():
    s = ms.build_network("dense")
    assert [l.time_stride for l in tdnnf(s)] == [1, 1, 1] + [3] * 10


def test_config_roundtrip(spec):
    text = ms.emit_config(spec)
    again = ms.parse_config(text)
    assert again == spec
    assert ms.emit_config(again) == text


def test_config_lines(spec):
    lines = [l for l in ms.emit_config(spec).splitlines() if "kind=TDNNF" in l]
    assert len(lines) == (13 if spec.name == "dense" else 4)
    dim = 1536 if spec.name == "dense" else 1024
    assert all(f"dim={dim}" in l and "bottleneck=160" in l for l in lines)


def test_config_flags_unpublished_values(spec):
    assert "not published" in ms.emit_config(spec)


@pytest.mark.parametrize("text", [
    "layer 0 kind=LINEAR in=4 out=4\n",
    "network name=x ivector-dim=100 raw-dim=40 num-targets=5\nlayer 1 kind=LINEAR in=4 out=4\n",
    "network name=x ivector-dim=100 raw-dim=40 num-targets=5\nlayer 0 kind=CONV in=4 out=4\n",
    "network name=x ivector-dim=100 raw-dim=40 num-targets=5\nlayer 0 kind=LINEAR in=4 out=4 color=red\n",
    "network name=x ivector-dim=100 raw-dim=40 num-targets=5\n"
    "layer 0 kind=LINEAR in=4 out=4\nlayer 1 kind=LINEAR in=5 out=4\n",
    "network name=x ivector-dim=100 raw-dim=40 num-targets=5\nlayer 0 kind=TDNNF in=4 out=4\n",
])
def test_bad_configs(text):
    with pytest.raises(ms.ConfigError):
        ms.parse_config(text)


@st.composite
def random_specs(draw):
    dims = st.integers(1, 4096)
    d = draw(dims)
    layers = [LayerSpec(K.AFFINE_LDA, d, d)]
    for _ in range(draw(st.integers(0, 6))):
        kind = draw(st.sampled_from([K.TDNNF, K.DENSE_RELU_BN_DROPOUT, K.LINEAR]))
        out = d if kind is K.TDNNF else draw(dims)
        layers.append(LayerSpec(
            kind, d, out,
            bottleneck=draw(dims) if kind is K.TDNNF else None,
            time_stride=draw(st.one_of(st.none(), st.integers(0, 6))),
        ))
        d = out
    targets = draw(st.integers(1, 5000))
    for branch, out_kind in (("chain", K.OUTPUT_CHAIN), ("xent", K.OUTPUT_XENT)):
        pre = draw(dims)
        layers.append(LayerSpec(K.PREFINAL, d, pre, branch=branch))
        layers.append(LayerSpec(out_kind, pre, targets, branch=branch))
    name = draw(st.sampled_from(["dense", "light", "custom"]))
    return ms.NetworkSpec(name, tuple(layers), num_targets=targets).validate()


@given(random_specs())
def test_random_roundtrip(spec):
    text = ms.emit_config(spec)
    assert ms.parse_config(text) == spec
    assert ms.emit_config(ms.parse_config(text)) == text
