"""Finite-time bias of the smallest particle in two-particle PushASEP.

With zeta = (1, 1) the rescaled pair should approach GUE corner minima. The KS
distance of the first coordinate to its limit shrinks like t^(-1/2): the
exclusion rule shifts X_1 by about half a lattice unit, a fixed offset that
the sqrt(t) scaling only slowly washes out.
"""
import math

import numpy as np

from qwalk.gue import gue2_marginal_cdf
from qwalk.harness import jitter, ks_test
from qwalk.pushasep import PushASEPSystem, simulate_many

sys_ = PushASEPSystem((1.0, 1.0), 1.0, 0.5, (-1, 0))
for t in (250.0, 1000.0, 4000.0):
    s = simulate_many(sys_, t, 40_000, seed=7, block=200)
    x1 = jitter(s[:, 0], np.random.default_rng(1))
    u = (x1 - 0.5 * t) / math.sqrt(1.5 * t)
    rep = ks_test(u, lambda z: gue2_marginal_cdf(1, z))
    lattice_offset = (u.mean() + 2 / math.sqrt(math.pi)) * math.sqrt(1.5 * t)
    print(f"t={t:6.0f}  KS={rep.statistic:.4f}  p={rep.value:.2g}  "
          f"KS*sqrt(t)={rep.statistic * math.sqrt(t):.3f}  mean offset={lattice_offset:+.2f}")
