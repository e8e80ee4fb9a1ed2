import sys, mpmath as mp
import hejhal
mp.mp.dps = 30
def H(R, M0):
    Y = (R + 40) / (2 * mp.pi * M0)
    c = hejhal.solve(R, M0, Y, M0 + 10)
    return c[3] - c[1] ** 2 + 1
R0 = mp.mpf("13.7797513519"); R1 = R0 + mp.mpf("1e-9")
h0 = H(R0, 30); h1 = H(R1, 30)
for it in range(4):
    R2 = R1 - h1 * (R1 - R0) / (h1 - h0)
    R0, h0 = R1, h1
    R1, h1 = R2, H(R2, 30)
    print(mp.nstr(R1, 25), mp.nstr(h1, 5), flush=True)
