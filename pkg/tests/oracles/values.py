"""Frozen reference values produced by derive.py (scipy solve_ivp/brentq/quad, no package imports)."""
import numpy as np

# 5 cos(2 pi x) + 1.5 sin(4 pi x)
TRIG_COEFS = [(1, 5.0, 0.0), (2, 0.0, 1.5)]
TRIG_M_3_7 = np.array([[-0.43814469824521074, 0.2830874464963773],
                       [-2.7533279456537154, -0.5034122822463645]])
TRIG_M_COMPLEX = np.array([
    [0.03370054627559528 - 0.35102716827998914j, 0.4617189643043371 - 0.11996826269324447j],
    [-2.2729885147322495 - 0.5601487031383552j, -0.07129546557368947 - 0.3255567769479788j]])
TRIG_M_SPAN = np.array([[-0.6658036335396611, -0.15766460776503283],
                        [4.84463932772804, -0.3547169596764245]])

KP_M_5 = np.array([[1.9688771512788328, 0.9480242732425155],
                   [-2.067844571410993, -0.4877738798312565]])
KP_EDGES = [4.485466820620949, 11.55780215084395, 17.907426111521385, 44.320286839797916,
            44.94698649637649, 92.83638173299238, 94.9387773802289]

# V = 0, W = cos, E = 0.5: one gap (-pi/3, pi/3)
FREE_COS_ACTION = 2.298373582435049

# Kronig-Penney + 5 cos at E = 8
KP5_PHI = [0.7913205631229582, 2.362512904136971, 3.9206724030426146, 5.491864744056628]
KP5_ACTIONS = (1.1226689421584386, 3.079460533313401)

# Kronig-Penney + cos at E = 5: crossings, which are also the only branch points in the strip
KP1_PHI = [1.0303331825006472, 5.25285212467894]
