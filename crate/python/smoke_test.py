"""Smoke test for the compiled `choquet` extension module."""

import math

import choquet


def main():
    l = choquet.Lattice.powerset(2)
    assert len(l) == 4 and l.top == "{}"
    f = choquet.SetFunction(l, {"{}": "1/1", "{a}": "1/2", "{b}": "2/3", "{a,b}": "1/3"})
    assert f.classify("exponential_valuation")["holds"]
    assert f.nabla(["{a}", "{b}"], "{}") == "1/6"
    assert f.represent("monotone")["{}"] == "1/6"
    assert f.levy_divisibility()["divisible"]

    g = choquet.SetFunction.from_json(
        '{"lattice":"powerset:2","direction":"inc",'
        '"values":{"{}":"1/1","{a}":"1/2","{b}":"1/2","{a,b}":"0/1"}}'
    )
    w = g.classify("exponential_valuation")["witness"]
    assert w["set"] == ["{a}", "{b}"], w

    r = choquet.estimate_poisson([("0/1", "1/2")], 20000, 7)
    assert abs(r["theory"] - math.exp(-0.5)) < 1e-12
    assert abs(r["z"]) < 4
    c = choquet.estimate_compound([(0b011, "1/2"), (0b100, "1/4")], 0b001, 20000, 7)
    assert abs(c["estimate"] - math.exp(-0.5)) < 4 * c["std_error"]

    cert = choquet.lfv_poisson(["9/10"] * 3, [0b011, 0b111])
    assert cert["verdict"] == "pass" and cert["exhaustive"]
    print("smoke test ok")


if __name__ == "__main__":
    main()
