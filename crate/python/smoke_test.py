"""Quick end-to-end check of the Python extension.

Build and install it first, e.g. ``pip install ./crates/py`` or
``maturin develop -m crates/py/Cargo.toml``.
"""

import math

import mbios_bounds as mb


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    bec = mb.Channel.bec(0.5)
    close(bec.capacity(), 0.5, 1e-15)
    close(bec.quantity_a(), 0.5, 1e-15)

    close(mb.h2(0.11), -(0.11 * math.log2(0.11) + 0.89 * math.log2(0.89)), 1e-15)

    g36 = mb.Ensemble.builtin("gallager_3_6")
    close(g36.design_rate, 0.5, 1e-12)
    assert g36.check_degrees() == [(6, 1.0)]

    close(mb.threshold(g36, "q4"), 0.332, 0.005)

    ch = mb.Channel.from_ebn0(1.0, 0.5)
    bounds = [mb.rate_bound(ch, g36, m) for m in ("capacity", "2level", "q4", "q8", "unq")]
    assert all(b >= a - 1e-9 for a, b in zip(bounds[1:], bounds)), bounds

    value, trivial = mb.density_bound(mb.Channel.biawgn(0.9), 0.1, "unq")
    assert value > 0 and not trivial

    half = mb.Channel.with_capacity(0.5)
    close(half.capacity(), 0.5, 1e-10)
    ber = mb.ber_bound(half, 0.49, t=2.0)
    assert ber["pb"] >= ber["legacy_pb"]

    try:
        mb.Channel.bsc(1.5)
    except ValueError:
        pass
    else:
        raise AssertionError("an invalid crossover probability was accepted")

    print("smoke test passed:", [round(b, 6) for b in bounds])


if __name__ == "__main__":
    main()
