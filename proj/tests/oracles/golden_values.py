"""Independent oracle for the constants frozen in the C++ test suite.

Run: python3 tests/oracles/golden_values.py
Everything here is written from the generator recurrence and the update rule
directly, without touching the C++ code.
"""
import numpy as np

MASK = (1 << 64) - 1


def splitmix64(seed):
    state = seed
    while True:
        state = (state + 0x9E3779B97F4A7C15) & MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        yield z ^ (z >> 31)


def unit(u):
    return (u >> 11) * 2.0**-53


def init(n, seed):
    g = splitmix64(seed)
    pos = np.zeros((n, 3))
    mass = np.zeros(n)
    for i in range(n):
        pos[i] = [unit(next(g)), unit(next(g)), unit(next(g))]
        mass[i] = 1.0 - unit(next(g))
    return pos, np.zeros((n, 3)), mass


def accelerations(pos, mass, G=1.0, eps2=1e-9):
    n = len(mass)
    acc = np.zeros_like(pos)
    for i in range(n):
        d = pos - pos[i]
        r2 = (d * d).sum(axis=1) + eps2
        w = mass / (r2 * np.sqrt(r2))
        w[i] = 0.0
        acc[i] = G * (w[:, None] * d).sum(axis=0)
    return acc


def simulate(pos, vel, mass, steps, dt=0.01):
    pos, vel = pos.copy(), vel.copy()
    for _ in range(steps):
        a = accelerations(pos, mass)
        dv = a * dt
        pos += (vel + 0.5 * dv) * dt
        vel += dv
    return pos, vel


def checksum(pos):
    total = 0.0
    for x, y, z in pos:
        total += x + y + z
    return total


if __name__ == "__main__":
    g = splitmix64(42)
    print("splitmix64(42) first 16:")
    for _ in range(16):
        print(f"  0x{next(g):016X}ULL,")
    g = splitmix64(42)
    print("init(2, 42) body 0 position:", [repr(unit(next(g))) for _ in range(3)])
    pos, vel, mass = init(256, 42)
    print("init checksum n=256 seed=42:", repr(checksum(pos)))
    fpos, _ = simulate(pos, vel, mass, 10)
    print("final checksum n=256 seed=42 steps=10 dt=0.01 G=1 eps2=1e-9:",
          repr(checksum(fpos)))
    print("unit-square corner:", repr(1.0 + 2.0**-1.5))
