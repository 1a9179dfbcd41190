"""Independent re-derivation of the frozen numbers in tests/fixtures.hpp.

Plain Python with exact fractions where possible; shares no code with the
C++ library. Run: python3 tests/oracles/derive.py
"""
from fractions import Fraction as Fr
import math


def dyn_gamma(length, l_ref, gamma_min):
    return max(gamma_min, 1 - Fr(length, 1) / l_ref * (1 - gamma_min))


def shaping(phi_k, phi_next, gamma):
    return gamma * phi_next - phi_k


def show(name, value):
    print(f"{name} = {float(value)!r}")


# two-segment advantage example
a, gmin, lref = Fr(3, 10), Fr(9, 10), 512
phi = [Fr(1, 2), Fr(7, 8), Fr(1)]
lens = [lref, 0]
for k in range(2):
    show(f"shape_adv[{k}]", 1 + a * shaping(phi[k], phi[k + 1], dyn_gamma(lens[k], lref, gmin)))

# tax decomposition example
g, pk, pn = Fr(9, 10), Fr(1, 2), Fr(3, 4)
show("raw_gain", pn - pk)
show("tax", (1 - g) * pk)
show("recombined", g * (pn - pk) - (1 - g) * pk)

# gamma table, exact values
for g in (Fr(1), Fr(9, 10), Fr(8, 10), Fr(7, 10), Fr(6, 10)):
    print(f"table gamma={float(g)} gphi={g * Fr(7, 8)} F={shaping(Fr(5, 8), Fr(7, 8), g)}")


# GRPO, population std
def grpo(rs, eps=1e-8):
    n = len(rs)
    mean = sum(rs) / n
    std = math.sqrt(sum((r - mean) ** 2 for r in rs) / n)
    return [(r - mean) / (std + eps) for r in rs]


print("grpo[1,0] =", grpo([1, 0]))
print("grpo[1,0,0,0] =", grpo([1, 0, 0, 0]))

# length derivative closed form
show("dF_dL(1, 0.9, 512)", -Fr(1) * Fr(1, 10) / 512)


# sandbag: MRT bonus sum alpha (R - phi_k); SHAPE alpha sum (g_k phi_{k+1} - phi_k)
def mrt_bonus(path):
    return sum(a * (path[-1] - p) for p in path[:-1])


def shape_bonus(path, lengths, l_ref):
    return sum(a * shaping(path[k], path[k + 1], dyn_gamma(lengths[k], l_ref, gmin))
               for k in range(len(path) - 1))


mono = [Fr(0), Fr(1, 4), Fr(1, 2), Fr(3, 4), Fr(1)]
dip = [Fr(0), Fr(1, 2), Fr(0), Fr(3, 4), Fr(1)]
# token cost: max(1, |levels moved|) short actions of 8 tokens, l_ref = c_l = 32
cost = lambda path: [8 * max(1, abs(int(path[k + 1] * 8) - int(path[k] * 8))) for k in range(len(path) - 1)]
show("mrt_mono", mrt_bonus(mono))
show("mrt_dip", mrt_bonus(dip))
print("lengths mono", cost(mono), "dip", cost(dip))
show("shape_mono", shape_bonus(mono, cost(mono), 32))
show("shape_dip", shape_bonus(dip, cost(dip), 32))
show("shape_mono_equal", shape_bonus(mono, [32] * 4, 32))
show("shape_dip_equal", shape_bonus(dip, [32] * 4, 32))

# entropy weights [0, 2], beta 0.5, eps 1e-6
h = [0.0, 2.0]
mu = sum(h) / 2
sd = math.sqrt(sum((x - mu) ** 2 for x in h) / 2)
print("weights [0,2] =", [min(1.5, max(0.5, 1 + 0.5 * (x - mu) / (sd + 1e-6))) for x in h])

# completion probability of the default chain under the uniform policy:
# 8 stages, progress 0..8, short/long +1, stall 0, regress -1 (floored at 0)
P, N = 8, 8
V = [Fr(p, P) for p in range(P + 1)]
table = [V]
for _ in range(N):
    nxt = []
    for p in range(P + 1):
        up = min(p + 1, P)
        down = max(p - 1, 0)
        nxt.append((2 * V[up] + V[p] + V[down]) / 4)
    V = nxt
    table.append(V)
table.reverse()  # table[stage][progress]
print("dp stage 0:", [float(x) for x in table[0]])
print("dp stage 4:", [float(x) for x in table[4]])

# gain distribution on an 8-transition fixture
fixture = [(0, .25), (.125, .125), (.25, .25), (.375, 0), (.5, .125), (.625, -.125), (.75, .125), (.875, -.25)]
bins = [[] for _ in range(4)]
for phi_k, gain in fixture:
    bins[min(3, int(phi_k * 4))].append(gain)
means = [sum(b) / len(b) for b in bins]
floor = min(means) - 0.03
shifted = [m - floor for m in means]
print("dist means", means, "percent", [100 * s / sum(shifted) for s in shifted])
