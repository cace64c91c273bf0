"""Independent oracles for the frozen values in values.py. Run by hand; no package imports."""
import numpy as np, math
from scipy.integrate import solve_ivp, quad
from scipy.optimize import brentq
np.set_printoptions(precision=17)

def ivp_matrix(V, E, x0, x1):
    def f(x, y):
        y = y.view(complex) if False else y
        u = y[0:2] + 1j*y[2:4]; up = y[4:6] + 1j*y[6:8]
        upp = (V(x) - E) * u
        return np.concatenate([up.real, up.imag, upp.real, upp.imag])
    y0 = np.array([1,0, 0,0, 0,1, 0,0], float)
    s = solve_ivp(f, (x0, x1), y0, method="DOP853", rtol=1e-13, atol=1e-14)
    y = s.y[:, -1]
    u = y[0:2] + 1j*y[2:4]; up = y[4:6] + 1j*y[6:8]
    return np.array([[u[0], u[1]], [up[0], up[1]]])

trig = lambda x: 5*np.cos(2*np.pi*x) + 1.5*np.sin(4*np.pi*x)
print("TRIG_3.7", repr(ivp_matrix(trig, 3.7, 0, 1)))
print("TRIG_2+1j", repr(ivp_matrix(trig, 2+1j, 0, 1)))
print("TRIG_span", repr(ivp_matrix(trig, 7.0, 0.2, 1.7)))
kpV = lambda x: 10.0 if (x % 1.0) < 0.5 else 0.0
m1 = ivp_matrix(lambda x: 10.0, 5.0, 0, .5); m2 = ivp_matrix(lambda x: 0.0, 5.0, .5, 1)
print("KP_5", repr(m2 @ m1))

def kpD(E, v=10.0):
    q1 = np.sqrt(complex(E - v)); q2 = np.sqrt(complex(E))
    a, b = q1*.5, q2*.5
    s1 = np.sin(a)/q1 if q1 != 0 else .5
    s2 = np.sin(b)/q2 if q2 != 0 else .5
    # trace of [[c2, s2],[-q2^2 s2, c2]] [[c1, s1],[-q1^2 s1, c1]]
    return (2*np.cos(a)*np.cos(b) - (q1**2 + q2**2)*s1*s2).real

grid = np.linspace(-1, 120, 400001)
Dg = np.array([kpD(e) for e in grid])
edges = []
for t in (2, -2):
    f = Dg - t
    for i in np.nonzero(np.sign(f[:-1]) != np.sign(f[1:]))[0]:
        edges.append(brentq(lambda e: kpD(e) - t, grid[i], grid[i+1], xtol=1e-14, rtol=4*np.finfo(float).eps))
print("KP_EDGES", repr(sorted(edges)))
E = sorted(edges)

# actions
f = lambda z: math.sqrt(max(math.cos(z) - 0.5, 0))
print("S_FREE_COS", repr(2*quad(f, -math.pi/3, math.pi/3, epsabs=1e-14, epsrel=1e-14)[0]))
def imk(e):
    return math.acosh(max(abs(kpD(e))/2, 1.0))
W5 = lambda z: 5*math.cos(z)
zs = np.linspace(0, 2*np.pi, 200001)
cls = np.array([abs(kpD(8 - W5(z))) <= 2 for z in zs])
ch = np.nonzero(cls[:-1] != cls[1:])[0]
phis = [brentq(lambda z: abs(kpD(8 - W5(z))) - 2, zs[i], zs[i+1], xtol=1e-15) for i in ch]
print("KP5COS_E8_PHI", repr(phis))
# gaps: (phi2, phi3) and (phi4, phi1+2pi)
g = lambda z: imk(8 - W5(z))
S1 = 2*quad(g, phis[1], phis[2], epsabs=1e-14, epsrel=1e-14, limit=200)[0]
S2 = 2*quad(g, phis[3], phis[0] + 2*np.pi, epsabs=1e-14, epsrel=1e-14, limit=200)[0]
print("KP5COS_E8_S", repr((S1, S2)))
# W=cos, E=5: crossings
zs = np.linspace(0, 2*np.pi, 200001)
cls = np.array([abs(kpD(5 - math.cos(z))) <= 2 for z in zs])
ch = np.nonzero(cls[:-1] != cls[1:])[0]
print("KPCOS_E5_PHI", repr([brentq(lambda z: abs(kpD(5 - math.cos(z))) - 2, zs[i], zs[i+1], xtol=1e-15) for i in ch]))
# dense-rectangle scan of |E - W - E_l| minima for W=cos, E=5, Y=0.5 and edges E1, E2
X, Yv = np.meshgrid(np.linspace(0, 2*np.pi, 1601), np.linspace(-0.5, 0.5, 401))
Z = X + 1j*Yv
for El in E[:4]:
    F = np.abs(5 - np.cos(Z) - El)
    mins = []
    for i in range(1, F.shape[0]-1):
        for j in range(1, F.shape[1]-1):
            v = F[i, j]
            if v <= F[i-1:i+2, j-1:j+2].min() and v < 0.05:
                mins.append(complex(Z[i, j]))
    print("SCAN", El, [complex(round(m.real, 3), round(m.imag, 3)) for m in mins])
