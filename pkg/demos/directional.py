"""The directional limit g(beta e) at a moderate length.

Each replica solves the two-point problem from 0 to l beta e with budget
l, unrestricted and inside the diamond and antidiamond. The limit is
symmetric, concave and nonincreasing in |beta|; at l = 6 the beta = 0
value still pays for the closed loop through the origin, so the centre
of the curve sits low. Compare the plain ratio with the increment
estimate, which cancels the endpoint cost.
"""
from greedymass.estimators import estimate_directional_limit

proc = {"kind": "poisson", "lam": 1.0, "mark": {"kind": "constant", "c": 1.0}}
rep = estimate_directional_limit(proc, [1, 0], [0.0, 0.2, 0.4, 0.6, 0.8], 0.3, 6.0, 60,
                                 seed=3, ell_ref=3.0)
print(" beta   ratio   +-95%   increment   diamond")
for g in rep.grid:
    dia = g.extra.get("diamond_mean", float("nan"))
    print(f"{g.param:5.1f}  {g.mean:.3f}   {g.ci:.3f}    {g.extra['increment_mean']:.3f}"
          f"     {dia:.3f}")
