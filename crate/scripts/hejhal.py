import sys, mpmath as mp
mp.mp.dps = int(sys.argv[3]) if len(sys.argv) > 3 else 30

def pullback(x, y):
    while True:
        x = x - mp.nint(x)
        r2 = x * x + y * y
        if r2 >= 1 - mp.mpf(10) ** (-mp.mp.dps + 5):
            return x, y
        x, y = -x / r2, y / r2

def solve(R, M0, Y, Q):
    Kt = lambda v: mp.exp(mp.pi * R / 2) * mp.besselk(1j * R, v).real
    pts = []
    for m in range(1, Q + 1):
        xm = (m - mp.mpf(1) / 2) / (2 * Q)
        xs, ys = pullback(xm, Y)
        pts.append((xm, xs, ys))
    V = mp.matrix(M0, M0)
    for l in range(1, M0 + 1):
        col = [mp.sqrt(ys) * Kt(2 * mp.pi * l * ys) * mp.cos(2 * mp.pi * l * xs) for (_, xs, ys) in pts]
        for n in range(1, M0 + 1):
            V[n - 1, l - 1] = 2 * sum(c * mp.cos(2 * mp.pi * n * xm) for c, (xm, _, _) in zip(col, pts)) / Q
        V[l - 1, l - 1] -= mp.sqrt(Y) * Kt(2 * mp.pi * l * Y)
    A = mp.matrix(M0 - 1, M0 - 1)
    b = mp.matrix(M0 - 1, 1)
    for n in range(2, M0 + 1):
        for l in range(2, M0 + 1):
            A[n - 2, l - 2] = V[n - 1, l - 1]
        b[n - 2] = -V[n - 1, 0]
    c = mp.lu_solve(A, b)
    return [mp.mpf(1)] + [c[i] for i in range(M0 - 1)]

if __name__ == "__main__":
    R = mp.mpf(sys.argv[1])
    M0 = int(sys.argv[2])
    Y = (R + 2 * mp.mp.dps) / (2 * mp.pi * M0)
    Q = M0 + 10
    c = solve(R, M0, Y, Q)
    print("Y", Y)
    print("c4-c2^2+1", c[3] - c[1] ** 2 + 1)
    print("c6-c2c3", c[5] - c[1] * c[2])
    for n in range(1, M0 + 1):
        print(n, mp.nstr(c[n - 1], 20))
