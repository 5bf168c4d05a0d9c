"""Pure-Python/numpy Euler-Maruyama ensemble kernel (fallback for ``_sde_core``).

Trajectories are processed in batches and stepped in lockstep.  Noise for
each trajectory is drawn from its own generator in chunks of steps, which
reproduces the compiled kernel's stream order exactly.
"""

import numpy as np

DIVERGENCE_BOUND = 1e6
BATCH = 1024
CHUNK = 512


def integrate_ensemble(A, L, dt, n_steps, burn, bitgens, threads=1):
    n_traj = len(bitgens)
    half = (n_steps - burn) // 2
    out = np.zeros((n_traj, 2, 10))
    status = np.zeros(n_traj, dtype=np.intc)
    A = [[float(v) for v in row] for row in np.asarray(A)]
    L = [[float(v) for v in row] for row in np.asarray(L)]
    pairs = [(i, j) for i in range(4) for j in range(i, 4)]

    for start in range(0, n_traj, BATCH):
        gens = [np.random.Generator(bg) for bg in bitgens[start:start + BATCH]]
        nb = len(gens)
        x = [np.zeros(nb) for _ in range(4)]
        acc = np.zeros((2, 10, nb))
        alive = np.ones(nb, dtype=bool)
        k = 0
        while k < n_steps:
            c = min(CHUNK, n_steps - k)
            noise = np.stack([gen.standard_normal((c, 4)) for gen in gens], axis=1)
            for s in range(c):
                z = noise[s]
                z0, z1, z2, z3 = z[:, 0], z[:, 1], z[:, 2], z[:, 3]
                x0, x1, x2, x3 = x
                xn = []
                for i in range(4):
                    a, l = A[i], L[i]
                    d = ((a[0] * x0 + a[1] * x1) + a[2] * x2) + a[3] * x3
                    nz = ((l[0] * z0 + l[1] * z1) + l[2] * z2) + l[3] * z3
                    xn.append((x[i] + dt * d) + nz)
                x = xn
                bad = ~((np.abs(x[0]) <= DIVERGENCE_BOUND) & (np.abs(x[1]) <= DIVERGENCE_BOUND)
                        & (np.abs(x[2]) <= DIVERGENCE_BOUND) & (np.abs(x[3]) <= DIVERGENCE_BOUND))
                if bad.any():
                    alive &= ~bad
                    if not alive.any():
                        break
                step = k + s
                if step >= burn:
                    h = 0 if step - burn < half else 1
                    row = acc[h]
                    for cidx, (i, j) in enumerate(pairs):
                        row[cidx] += x[i] * x[j]
            k += c
            if not alive.any():
                break
        out[start:start + nb, 0] = (acc[0] / half).T
        out[start:start + nb, 1] = (acc[1] / (n_steps - burn - half)).T
        status[start:start + nb] = ~alive
    return out, status
