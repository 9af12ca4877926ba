"""Heavy tails against light tails on growing windows.

The witness statistic is max over l >= 8 of (mass of an explicit path)/l,
a lower bound on the optimum. Columnar exponential masses make one heavy
column reachable in every large window, so the statistic keeps growing;
bounded masses plateau.
"""
from greedymass.estimators import divergence_probe

for name, mark in (("exponential columns", {"kind": "exponential", "rate": 1.0}),
                   ("constant columns", {"kind": "constant", "c": 1.0})):
    out = divergence_probe("columnar", {"mark": mark}, [16, 256, 4096, 65536], 6, seed=1)
    meds = "  ".join(f"{m:6.2f}" for m in out["median"])
    print(f"{name:20s} medians {meds}  -> {out['classification']}")
