"""Smoke test for the nscurve extension module.

Build and install first:  pip install --no-build-isolation -e crates/py
"""

import json
import math

import nscurve

XY = ["x", "y"]


def main():
    e = nscurve.Expr("x^3 + sin(x)*y", vars=XY)
    assert str(e.diff("x").canonical()) == str(nscurve.Expr("3*x^2 + cos(x)*y", vars=XY).canonical())
    assert e.evaluate({"x": 0.0, "y": 2.0}) == 0.0
    zero = nscurve.Expr("exp(x)^2 - exp(2*x)", vars=XY)
    assert zero.is_zero()[0] == "proven_zero"
    assert nscurve.Expr("x - y", vars=XY).is_zero()[0] == "refuted"

    mixed = nscurve.Expr("u*rho_a")
    assert (mixed.total(1, 1) - mixed.total(0, 1).total(1, 0)).is_zero()[0] == "proven_zero"

    case = nscurve.Case("power", "exp")
    labels = [label for label, _ in case.generators()]
    assert labels == ["X1", "X2", "X3", "X4"], labels
    assert case.derived_series() == [4, 3, 0]
    assert case.is_symmetry({"t": "1"})[0] == "proven_zero"
    assert case.is_symmetry({"u": "1"})[0] == "refuted"

    report = json.loads(nscurve.verify(zeta="any", h="const"))
    assert report["summary"]["fail"] == 0 and report["summary"]["inconclusive"] == 0
    assert {"id", "case", "kind", "verdict", "residual", "runtime_ms"} <= set(report["checks"][0])

    report = json.loads(nscurve.invariants(zeta="power", h="log"))
    assert report["summary"]["fail"] == 0

    assert "zeta-any" in nscurve.chart_ids()
    chart = json.loads(nscurve.check_chart("zeta-power-4"))
    assert chart["lagrangian"]["verdict"] == "proven_zero"

    assert json.loads(nscurve.lift_checks())["summary"]["fail"] == 0
    pts = nscurve.lift("log", n=400)
    assert len(pts) == 400
    assert abs(pts[-1][4] - 2 * math.pi) < 1e-8
    l = nscurve.arclength("log", 2.0)
    assert abs(l - (math.sqrt(3) - math.atan(math.sqrt(3)))) < 1e-9
    assert abs(nscurve.hyp2f1(1, 1, 2, 0.5) - 2 * math.log(2)) < 1e-12
    assert nscurve.relation_residual("quadratic", 0.0, 0.5, lambda_=0.5) < 1e-8

    print("smoke ok")


if __name__ == "__main__":
    main()
