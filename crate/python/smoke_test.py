"""Smoke test for the Python extension.

Build and install it first, e.g. `maturin develop -m crates/py/Cargo.toml`,
or copy target/release/libshapoform.so next to this script as shapoform.so.
"""

from fractions import Fraction

import shapoform


def main():
    g2 = shapoform.roots("G2")
    assert len(g2["positive_roots"]) == 6, g2

    dims = shapoform.verma_dims("A2", 3)
    assert dims[(1, 1)] == 2 and sum(dims.values()) == 1 + 2 + 4 + 6, dims

    rows, cols, block = shapoform.gram("A1", 2, [1])
    assert rows == ["e1"] and cols == ["f1"], (rows, cols)
    # <f1 1, e1*> = -z^{-1}[z]_q; at q = 2, z = 3 this is -(3 - 1/3)/(2 - 1/2) / 3
    value = block[0][0].evaluate("2", ["3"])
    assert value == Fraction(-16, 27), value

    entries = shapoform.fhat("A1", "natural")
    x = entries[("1", "f1")]["f1"]
    assert isinstance(x, shapoform.RationalFunction)
    numeric = shapoform.fhat("A1", "natural", q="2", z=["3"])[("1", "f1")]["f1"]
    assert x.evaluate(2, [3]) == numeric, (x, numeric)

    sv = shapoform.singular_vectors("B2", "fund:1")
    assert all(sv["annihilated"].values()) and sv["independent"], sv

    report = shapoform.verify_inverse_form("A2", 3, "all")
    assert report["passed"], report
    assert shapoform.verify_inverse_form("B2", 2, "both", q="3/2", z=["2", "-5"])["passed"]

    assert shapoform.verify_abrr("A1", cutoff=4)["passed"]
    assert shapoform.verify_key_identity("A2", cutoff=2)["passed"]
    audit = shapoform.audit_denominators("A2", 3)
    assert audit["passed"] and not audit["unexplained"], audit

    try:
        shapoform.fhat("A1", "natural", q="2", z=["1"])
    except ArithmeticError:
        pass
    else:
        raise AssertionError("a pole should raise")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
