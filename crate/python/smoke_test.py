"""Smoke test for the pykmod extension module.

Build and install first, e.g.
    pip install maturin
    maturin build --release -m crates/python/Cargo.toml
    pip install target/wheels/pykmod-*.whl
"""

import json

import pykmod


def main():
    z = pykmod.example4()
    assert z.validate() == []
    assert z.classify() == ("sink", 1, 2, "root")
    assert z.pushdown_dims() == (1, 2)
    assert z.is_regular() and z.end_dim() == 1

    sz = z.sigma()
    assert sz.classify()[:2] == ("flow", 0)
    assert pykmod.is_isomorphic(sz.sigma_minus(), z)

    x = z.sigma_power(2)
    assert x.classify()[0] == "source"
    assert not set(x.dims) & set(z.dims)
    assert pykmod.ext_dim(z, x) == 1

    ar = json.loads(pykmod.ar_sequence(z))
    ys = ar["report"]["y_summands"]
    assert [(y["type"], y["r"], y["center"]) for y in ys] == [("flow", 1, "{root,+2}")]

    orbit = json.loads(pykmod.orbit_report(z))
    assert (orbit["r0"], orbit["b"], orbit["iota_of_input"]) == (1, 1, 0)

    m = pykmod.random_regular(seed=3)
    assert m.is_regular()
    assert pykmod.TreeModule.from_json(m.to_json()) == m
    assert pykmod.hom_dim(m, m) - pykmod.ext_dim(m, m) == pykmod.euler_form(m, m)
    parts = pykmod.decompose(m.direct_sum(m))
    assert len(parts) == 2 and all(pykmod.is_isomorphic(p, m) for p in parts)

    code, text = pykmod.run_cli(["check", "--suite", "functor", "--seeds", "3"])
    assert code == 0, text

    try:
        pykmod.example4(0, 1)
    except ValueError:
        pass
    else:
        raise AssertionError("zero scalar accepted")

    print("pykmod smoke test passed")


if __name__ == "__main__":
    main()
