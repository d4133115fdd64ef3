#!/usr/bin/env python3
"""Independent oracles for the frozen fixture values used by the C++ tests.

Writes tests/fixtures/nogo_floor.json and tests/fixtures/forgery_detection.json.
Nothing here shares code with the C++ implementation.

  python3 tests/oracles/gen_oracles.py
"""
import json
import math
import pathlib

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


# --- qubit no-go floor -------------------------------------------------------
#
# f(U, V, W) = |<W|U x I|W>|^2 + |<W|I x V|W>|^2 + |<W|U x V|W>|^2
#            + |1 - <W|U x V^+|W>|^2,   U = cos(nu) I + i sin(nu) m.sigma, V likewise.
#
# Rotating m and n to z by local SU(2) conjugation, absorbed into W, leaves f
# unchanged, so U and V are diagonal in the product basis.  Each expectation is
# then sum_j w_j z_j with w_j = |W_j|^2 on the probability simplex, and f is a
# convex quadratic in w.  For every (nu, theta) on the angle grid the inner
# minimum over w is solved exactly (convex => local == global); 50 random W per
# grid point are also evaluated on the full 14-parameter objective as a sanity
# upper bound.

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.diag([1.0 + 0j, -1.0])
I2 = np.eye(2, dtype=complex)


def pauli_op(angle, axis):
    return math.cos(angle) * I2 + 1j * math.sin(angle) * (
        axis[0] * SX + axis[1] * SY + axis[2] * SZ)


def full_objective(U, V, w):
    e = lambda M: np.vdot(w, M @ w)
    return (abs(e(np.kron(U, I2))) ** 2 + abs(e(np.kron(I2, V))) ** 2
            + abs(e(np.kron(U, V))) ** 2 + abs(1 - e(np.kron(U, V.conj().T))) ** 2)


def diagonal_min(nu, theta):
    a = np.exp(1j * nu * np.array([1, 1, -1, -1]))   # U x I eigenvalues
    b = np.exp(1j * theta * np.array([1, -1, 1, -1]))  # I x V eigenvalues

    def g(w):
        return (abs(w @ a) ** 2 + abs(w @ b) ** 2 + abs(w @ (a * b)) ** 2
                + abs(1 - w @ (a * b.conj())) ** 2)

    cons = ({"type": "eq", "fun": lambda w: w.sum() - 1.0},)
    best = math.inf
    for start in (np.full(4, 0.25), np.eye(4)[0] * 0.7 + 0.075, np.eye(4)[3] * 0.7 + 0.075):
        res = minimize(g, start, method="SLSQP", bounds=[(0, 1)] * 4, constraints=cons,
                       options={"ftol": 1e-15, "maxiter": 500})
        w = np.clip(res.x, 0, None)
        w /= w.sum()
        best = min(best, g(w))
    return best


def nogo_floor(rng):
    step = math.pi / 12
    grid = [k * step for k in range(24)]
    grid_min = math.inf
    random_min = math.inf
    for nu in grid:
        for theta in grid:
            grid_min = min(grid_min, diagonal_min(nu, theta))
            U = pauli_op(nu, (0, 0, 1))
            V = pauli_op(theta, (0, 0, 1))
            for _ in range(50):
                w = rng.normal(size=4) + 1j * rng.normal(size=4)
                w /= np.linalg.norm(w)
                random_min = min(random_min, full_objective(U, V, w))
    return grid_min, random_min


# --- forgery detection rate --------------------------------------------------
#
# Forger casts |psi(theta_y + eps)>, eps ~ U[-pi*scale/d, pi*scale/d], drawn
# fresh for each of the R repetitions.  The voter-side shift r is uniform and
# taken mod d, so the forged qudit contributes e^{i d (theta_y + eps)} to every
# coefficient k < r.  The authority removes e^{ikN theta_n} and the announced
# e^{i d delta} per shift, leaving
#   (1/sqrt d) sum_k e^{ik(2 pi p0/d + eps)} e^{i d eps [k < r]} |k..k>,
# so outcome offset j = p - p0 has probability
#   |(1/d) sum_k e^{ik(eps - 2 pi j/d) + i d eps [k < r]}|^2.
# For prime d every p is a multiple of l_y - l_n, so detection == "repetitions
# disagree".  Rate = 1 - sum_j q_j^R with q_j = E_{eps, r}[P(j | eps, r)].

def offset_probs(d, eps, r):
    k = np.arange(d)
    wrap = np.where(k < r, d * eps, 0.0)
    js = np.arange(d)
    amps = np.exp(1j * (np.outer(eps - 2 * math.pi * js / d, k) + wrap)).sum(axis=1) / d
    return np.abs(amps) ** 2


def forgery_rate_quadrature(d, reps, scale):
    h = math.pi * scale / d
    q = np.zeros(d)
    for j in range(d):
        for r in range(d):
            q[j] += quad(lambda e: offset_probs(d, e, r)[j], -h, h, limit=200)[0] / (2 * h * d)
    return 1.0 - float(sum(x ** reps for x in q))


def forgery_rate_montecarlo(d, reps, scale, trials, rng):
    h = math.pi * scale / d
    detected = 0
    for _ in range(trials):
        outcomes = []
        for _ in range(reps):
            p = offset_probs(d, rng.uniform(-h, h), rng.integers(d))
            outcomes.append(rng.choice(d, p=p / p.sum()))
        detected += len(set(outcomes)) > 1
    return detected / trials


def main():
    rng = np.random.default_rng(20240611)
    grid_min, random_min = nogo_floor(rng)
    floor = grid_min * (1.0 - 1e-6)
    (FIXTURES / "nogo_floor.json").write_text(json.dumps({
        "angle_step": "pi/12",
        "omega_samples_per_point": 50,
        "grid_min_exact_inner": grid_min,
        "grid_min_random_omega": random_min,
        "relative_slack": 1e-6,
        "epsilon0": floor,
    }, indent=2) + "\n")

    d, reps, scale = 11, 3, 1.0
    quad_rate = forgery_rate_quadrature(d, reps, scale)
    mc_trials = 200000
    mc_rate = forgery_rate_montecarlo(d, reps, scale, mc_trials, rng)
    (FIXTURES / "forgery_detection.json").write_text(json.dumps({
        "d": d,
        "repetitions": reps,
        "error_scale": scale,
        "rate_quadrature": quad_rate,
        "rate_montecarlo": mc_rate,
        "montecarlo_trials": mc_trials,
        "tolerance": 0.03,
    }, indent=2) + "\n")
    print(f"nogo: grid {grid_min:.12f} random {random_min:.6f} floor {floor:.12f}")
    print(f"forgery: quadrature {quad_rate:.6f} montecarlo {mc_rate:.6f}")


if __name__ == "__main__":
    main()
