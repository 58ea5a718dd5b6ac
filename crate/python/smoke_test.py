"""Smoke test for the nielsen_zeta_py extension module.

Build and run:
    cargo build --release -p nielsen-zeta-py
    cp target/release/libnielsen_zeta_py.so python/nielsen_zeta_py.so
    python3 python/smoke_test.py
or install with `maturin develop -m crates/python/Cargo.toml`.
"""

import math
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import nielsen_zeta_py as nz

PERIODIC = '{"type": "periodic", "period": "2", "nielsen": {"1": "1", "2": "3"}}'
TORUS = '{"type": "torus_linear", "matrix": [["2", "1"], ["1", "1"]]}'


def main():
    d = nz.Descriptor.from_json(PERIODIC)
    assert d.kind == "periodic"
    z = nz.zeta(d)
    assert str(z) == "(1 - z)^(-1) · (1 - z^2)^(-1)", str(z)
    assert z.is_rational
    assert z.expand(16) == d.series(16)
    assert nz.verify(d, 64) is None

    torus = nz.Descriptor.from_json(TORUS)
    assert torus.nielsen_sequence(3) == ["1", "5", "16"]
    assert [Fraction(c) for c in nz.zeta(torus).expand(3)] == [1, 1, 3, 8]
    assert nz.Descriptor.from_json(torus.to_json()) == torus

    try:
        nz.Descriptor.from_json('{"type": "periodic", "period": "1", "nielsen": {"1": "1"}, "extra": "1"}')
    except nz.ZetaError as e:
        assert "extra" in str(e)
    else:
        raise AssertionError("unknown field accepted")

    assert nz.twisted_witness("a -> a b, b -> a", "a", "a b", 1) == "a^-1"
    rows = nz.class_counts("a -> a", 3, 4)
    assert rows[-1][2] == 7

    assert math.isclose(nz.asym_eval(2.0, [1.0], 1.0), math.exp(2.0), rel_tol=1e-12)
    xs = [5.0 + 0.5 * i for i in range(31)]
    counts = [math.exp(2 * x) * x**-1.5 * (3.7 + 1.2 / x) for x in xs]
    coeffs, _ = nz.asym_fit(xs, counts, h=2.0, n=2, odd_zero=True)
    assert abs(coeffs[0] / 3.7 - 1) < 1e-6 and coeffs[1] == 0.0 and abs(coeffs[2] / 1.2 - 1) < 1e-6
    print("smoke test ok")


if __name__ == "__main__":
    main()
