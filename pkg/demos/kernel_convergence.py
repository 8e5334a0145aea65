"""Finite-level kernels approach the N = infinity kernel as N grows."""
import math

from qwalk.glaurent import AdmissibleFunction
from qwalk.kernel import KernelSpec, SpaceTimePoint, kernel_finite_N, kernel_limit

g = AdmissibleFunction.parse("bernoulli_up:1")
pairs = [(SpaceTimePoint(0, 1), SpaceTimePoint(0, 1)), (SpaceTimePoint(1, 1), SpaceTimePoint(-1, 2))]
limit = [kernel_limit(a, b, KernelSpec(0.5, math.inf, g=g)).real for a, b in pairs]
for n in (2, 5, 10, 20):
    ks = KernelSpec(0.5, n, g=g)
    diff = max(abs(kernel_finite_N(a, b, ks).real - l) for (a, b), l in zip(pairs, limit))
    print(f"N={n:3d}  max |K_N - K_inf| = {diff:.3e}")
