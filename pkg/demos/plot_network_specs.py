"""
Dense and light acoustic model layouts
======================================

Layer tables, parameter counts and the text config for both variants.
"""

from digits_toolkit import model_spec

dense = model_spec.build_network("dense")
light = model_spec.build_network("light")

for spec in (dense, light):
    print(spec.name, f"{model_spec.param_count(spec):,} parameters")
    for layer in spec.layers:
        print(f"  {layer.kind.value:<22} {layer.in_dim:>5} -> {layer.out_dim:<5}"
              f" {model_spec.layer_params(layer):>10,}")

print(model_spec.COUNT_CONVENTION)

# the config text is the serialized form; it parses back to the same spec
text = model_spec.emit_config(light)
print(text)
assert model_spec.parse_config(text) == light
