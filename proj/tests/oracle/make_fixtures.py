#!/usr/bin/env python3
"""Independent oracle for the fsforge test fixtures.

Everything here is computed from scratch (numpy roots + Newton polish in
mpmath precision, scipy DOP853 shooting at 10x tighter tolerance than the
library defaults) and frozen into tests/fixtures/fixtures.json.  The C++
implementation is tested against these numbers; this script never imports
or calls the library.

Conventions (shared definitions, independent numerics):
  f_theta = Re(e^{-i theta} F),  grad f_theta = conj(e^{-i theta} F'(z))
  theta(x -> y) = arg(F(y) - F(x))                (directed slope)
  ascent rays at x:       2 beta = theta - arg F''(x)
  distinguished line D_x: 2 beta = pi + theta - arg F''(x)   (descent)
  grading: lift in [0,pi), short path rotates through angle in (-pi, 0]
"""

import json
import math
import cmath
import numpy as np
from scipy.integrate import solve_ivp

RTOL = 1e-11          # 10x tighter than the library's 1e-10
ATOL = 1e-14
LAUNCH = 1e-5         # 10x tighter than library launch_radius 1e-4
CAPTURE = 1e-4        # 10x tighter than library capture_radius 1e-3
TMAX = 400.0

TWO_PI = 2.0 * math.pi


# ----------------------------------------------------------------------
# polynomial helpers (coefficients constant-first, complex)

def peval(c, z):
    r = 0j
    for a in reversed(c):
        r = r * z + a
    return r


def pder(c):
    return [k * c[k] for k in range(1, len(c))]


def crit_data(coeffs):
    """Critical points of F (roots of F') polished by Newton, sorted by
    (Re, Im) for a deterministic fixture order."""
    d1 = pder(coeffs)
    d2 = pder(d1)
    roots = np.roots(list(reversed(d1)))
    out = []
    for r in roots:
        z = complex(r)
        for _ in range(60):
            fp = peval(d1, z)
            fpp = peval(d2, z)
            step = fp / fpp
            z = z - step
            if abs(step) < 1e-15 * (1 + abs(z)):
                break
        out.append(z)
    out.sort(key=lambda w: (round(w.real, 12), round(w.imag, 12)))
    return [{
        "z": [z.real, z.imag],
        "value": [peval(coeffs, z).real, peval(coeffs, z).imag],
        "f2": [peval(d2, z).real, peval(d2, z).imag],
    } for z in out]


# ----------------------------------------------------------------------
# clockwise ordering

def clockwise_angle(alpha, w):
    return (alpha - cmath.phase(w)) % TWO_PI


def ordering(alpha, values):
    ang = [clockwise_angle(alpha, v) for v in values]
    order = sorted(range(len(values)), key=lambda i: ang[i])
    return ang, order


# ----------------------------------------------------------------------
# separatrix shooting

def grad_field(coeffs, theta, z):
    d1 = pder(coeffs)
    return (cmath.exp(-1j * theta) * peval(d1, z)).conjugate()


def shoot(coeffs, theta, z0, crits, source_idx, tmax=TMAX):
    """Integrate dz/dt = grad f_theta from z0.  Returns (fate, detail) where
    fate is 'capture'/'runaway'/'timeout' and detail the captured index."""
    d1 = pder(coeffs)
    cth = cmath.exp(-1j * theta)
    rmax = 10.0 * (1.0 + max(abs(c) for c in crits))

    def rhs(t, y):
        v = (cth * peval(d1, complex(y[0], y[1]))).conjugate()
        return [v.real, v.imag]

    targets = [c for k, c in enumerate(crits) if k != source_idx]
    tidx = [k for k in range(len(crits)) if k != source_idx]

    def ev_capture(t, y):
        z = complex(y[0], y[1])
        return min(abs(z - c) for c in targets) - CAPTURE
    ev_capture.terminal = True
    ev_capture.direction = -1

    def ev_runaway(t, y):
        return abs(complex(y[0], y[1])) - rmax
    ev_runaway.terminal = True
    ev_runaway.direction = 1

    t0, z = 0.0, z0
    while True:
        sol = solve_ivp(rhs, (t0, tmax), [z.real, z.imag], method="DOP853",
                        rtol=RTOL, atol=ATOL, events=[ev_capture, ev_runaway],
                        dense_output=True)
        if sol.t_events[1].size:
            return "runaway", None, sol
        if not sol.t_events[0].size:
            return "timeout", None, sol
        # proximity event: confirm genuine capture by coasting further and
        # checking the distance keeps shrinking (transversal passes leave)
        te = sol.t_events[0][0]
        ze = complex(sol.y_events[0][0][0], sol.y_events[0][0][1])
        k = min(range(len(targets)), key=lambda j: abs(ze - targets[j]))
        lam = abs(peval(pder(d1), targets[k]))
        coast = solve_ivp(rhs, (te, te + 6.0 / max(lam, 1e-6)),
                          [ze.real, ze.imag], method="DOP853",
                          rtol=RTOL, atol=ATOL)
        zf = complex(coast.y[0][-1], coast.y[1][-1])
        if abs(zf - targets[k]) < 0.3 * CAPTURE:
            return "capture", tidx[k], sol
        # rare transversal pass: push beyond the ball and continue
        t0 = coast.t[-1]
        z = zf
        if t0 >= tmax:
            return "timeout", None, sol


def connection_count(coeffs, crits, i, j):
    """Count flowlines x_i -> x_j (directed theta), and keep the solution
    object of each connecting separatrix for the winding oracle."""
    F = coeffs
    vi = peval(F, crits[i])
    vj = peval(F, crits[j])
    theta = cmath.phase(vj - vi)
    d2 = pder(pder(F))
    beta = 0.5 * (theta - cmath.phase(peval(d2, crits[i])))
    hits = []
    for s in (0, 1):
        z0 = crits[i] + LAUNCH * cmath.exp(1j * (beta + s * math.pi))
        fate, k, sol = shoot(F, theta, z0, crits, i)
        if fate == "capture" and k == j:
            hits.append((beta + s * math.pi, sol))
        elif fate == "timeout":
            raise RuntimeError(f"inconclusive shot {i}->{j}")
    return theta, hits


# ----------------------------------------------------------------------
# winding oracle for gradings (scalar angle ODE, independent of any
# matrix transport):  beta' = -Im(G'' e^{2 i beta}),  G'' = e^{-i th} F''

def dist_line_angle(theta, f2):
    return 0.5 * (math.pi + theta - cmath.phase(f2)) % math.pi


def grading_oracle(coeffs, crits, i, j, theta, launch_angle):
    d1 = pder(coeffs)
    d2 = pder(d1)
    cth = cmath.exp(-1j * theta)
    x, y = crits[i], crits[j]
    beta_x = dist_line_angle(theta, peval(d2, x))
    beta_y = dist_line_angle(theta, peval(d2, y))

    def rhs(t, s):
        z = complex(s[0], s[1])
        v = (cth * peval(d1, z)).conjugate()
        g2 = cth * peval(d2, z)
        db = -(g2 * cmath.exp(2j * s[2])).imag
        return [v.real, v.imag, db]

    z0 = x + LAUNCH * cmath.exp(1j * launch_angle)

    def ev(t, s):
        return abs(complex(s[0], s[1]) - y) - CAPTURE
    ev.terminal = True
    ev.direction = -1

    sol = solve_ivp(rhs, (0, TMAX), [z0.real, z0.imag, beta_x],
                    method="DOP853", rtol=RTOL, atol=ATOL, events=[ev])
    assert sol.t_events[0].size, "winding oracle shot missed"
    b_end = sol.y[2][-1]
    # snap to the nearest eigenline of the limiting Hessian at y
    g2y = cth * peval(d2, y)
    eig = 0.5 * (math.pi - cmath.phase(g2y))      # descent line angle at y
    corr = (eig - b_end + math.pi / 2) % (math.pi / 2) - math.pi / 4
    # eigenlines sit at eig + k*pi/2; snap b_end onto that lattice
    k = round((b_end - eig) / (math.pi / 2))
    b_snap = eig + k * math.pi / 2
    assert abs(b_snap - b_end) < 0.2, f"snap too large: {b_snap - b_end}"
    # canonical short path: rotate from b_snap to beta_y through (-pi, 0]
    delta = (beta_y - b_snap) % math.pi
    if delta > 0:
        delta -= math.pi            # representative in (-pi, 0]
    lift_x, lift_y = beta_x, beta_y  # standard lifts in [0, pi)
    gr = (lift_x + (b_snap - beta_x) + delta - lift_y) / math.pi
    gri = round(gr)
    assert abs(gr - gri) < 1e-6, f"non-integer grading {gr}"
    return gri, b_snap - beta_x


# ----------------------------------------------------------------------
# action quadrature:  A = int lambda(gamma') dt - int (g - g(x)) dt

def action_oracle(coeffs, theta, sol, x, y):
    cth = cmath.exp(-1j * theta)
    d1 = pder(coeffs)
    ts = np.linspace(sol.t[0], sol.t[-1], 20001)
    zs = [complex(*sol.sol(t)[:2]) for t in ts]
    gx = (cth * peval(coeffs, x)).imag
    lam = []
    gdev = []
    for z in zs:
        v = (cth * peval(d1, z)).conjugate()
        lam.append(0.5 * (z.conjugate() * v).imag)
        gdev.append((cth * peval(coeffs, z)).imag - gx)
    a = np.trapezoid(lam, ts) - np.trapezoid(gdev, ts)
    z0, z1 = zs[0], zs[-1]
    a += 0.5 * (x.conjugate() * (z0 - x)).imag      # exponential tails
    a -= 0.5 * (y.conjugate() * (z1 - y)).imag
    return float(a)


# ----------------------------------------------------------------------
# ascent-direction brute force (settles the unstable-ray formula)

def ascent_check(coeffs, x, theta):
    cth = cmath.exp(-1j * theta)
    f = lambda z: (cth * peval(coeffs, z)).real
    r = 1e-3
    best = max(range(3600),
               key=lambda k: f(x + r * cmath.exp(1j * k * math.pi / 1800)))
    coarse = best * math.pi / 1800.0
    # Refine well past the pi/1800 grid: the symmetric second difference
    # b -> f(x+u) + f(x-u) - 2 f(x), u = R e^{ib}, cancels the odd Taylor
    # terms, and its frequency-2 Fourier mode isolates the quadratic part
    # of the landscape; the ascent ray is where that mode peaks.  Still a
    # direct measurement of f -- no derivative formulas involved.
    R, N = 0.25, 64
    fx = f(x)
    w = 0j
    for k in range(N):
        b = 2.0 * math.pi * k / N
        u = R * cmath.exp(1j * b)
        w += (f(x + u) + f(x - u) - 2.0 * fx) * cmath.exp(-2j * b)
    # w = (N/2) q for the mode Re(q e^{2ib}), which peaks at 2b = -arg q
    fine = -0.5 * cmath.phase(w)
    # rays come in +/- pairs: pick the representative the scan found
    while fine < coarse - math.pi / 2:
        fine += math.pi
    while fine > coarse + math.pi / 2:
        fine -= math.pi
    return fine


# ----------------------------------------------------------------------
# wall-crossing families

def tracked_values(base, vel, ts):
    """Critical values along F_t = base + t*vel, labels continued in t."""
    prev = None
    rows = []
    for t in ts:
        c = [b + t * v for b, v in zip(base, vel)]
        rts = [complex(r) for r in np.roots(list(reversed(pder(c))))]
        if prev is None:
            rts.sort(key=lambda w: (round(w.real, 9), round(w.imag, 9)))
        else:
            used, ordered = set(), []
            for p in prev:
                k = min((j for j in range(len(rts)) if j not in used),
                        key=lambda j: abs(rts[j] - p))
                used.add(k)
                ordered.append(rts[k])
            rts = ordered
        prev = rts
        rows.append([peval(c, z) for z in rts])
    return rows


def find_crossing(base, vel, t_lo, t_hi, n=4001):
    """Locate a single passage of one critical value through the open
    segment of the other two.  Returns (t_star, m, i, k)."""
    ts = np.linspace(t_lo, t_hi, n)
    vals = tracked_values(base, vel, ts)
    events = []
    for m in range(3):
        i, k = [a for a in range(3) if a != m]
        prev_s = None
        for row, t in zip(vals, ts):
            d = row[k] - row[i]
            s = (d.conjugate() * (row[m] - row[i])).imag
            p = (d.conjugate() * (row[m] - row[i])).real / abs(d) ** 2
            if prev_s is not None and s * prev_s < 0 and 0.05 < p < 0.95:
                events.append((t, m, i, k))
            prev_s = s
    return events


def family_fixture(name, base, vel, t_lo, t_hi):
    events = find_crossing(base, vel, t_lo, t_hi)
    assert len(events) == 1, f"{name}: expected 1 crossing, got {events}"
    t_star, m, i, k = events[0]
    dt = 0.12 * (t_hi - t_lo)
    tb, ta = t_star - dt, t_star + dt

    def counts_at(t):
        c = [b + t * v for b, v in zip(base, vel)]
        cd = crit_data(c)
        crits = [complex(*e["z"]) for e in cd]
        out = {}
        for a in range(3):
            for b in range(3):
                if a != b:
                    th, hits = connection_count(c, crits, a, b)
                    out[f"{a}->{b}"] = len(hits) % 2
        return cd, out

    cd_b, nb = counts_at(tb)
    cd_a, na = counts_at(ta)
    # labels in counts_at are sorted by (Re,Im) at each t; map the tracked
    # labels (m, i, k) onto those sorted labels at tb via value proximity
    ts = np.linspace(t_lo, t_hi, 4001)
    vals = tracked_values(base, vel, ts)
    row_b = vals[int(np.argmin(np.abs(ts - tb)))]
    row_a = vals[int(np.argmin(np.abs(ts - ta)))]

    def relabel(row, cd):
        lab = []
        for v in row:
            lab.append(min(range(3),
                           key=lambda j: abs(complex(*cd[j]["value"]) - v)))
        return lab
    lab_b = relabel(row_b, cd_b)   # tracked index -> sorted index at tb
    lab_a = relabel(row_a, cd_a)
    mi, ii, ki = lab_b[m], lab_b[i], lab_b[k]
    assert (lab_a[m], lab_a[i], lab_a[k]) == (mi, ii, ki), \
        f"{name}: label drift across the wall"
    n13b = nb[f"{ii}->{ki}"]
    n12b = nb[f"{ii}->{mi}"]
    n23b = nb[f"{mi}->{ki}"]
    n13a = na[f"{ii}->{ki}"]
    predicted = (n13b + n12b * n23b) % 2
    assert n13a == predicted, \
        f"{name}: PL prediction fails: {n13b}+{n12b}*{n23b} != {n13a}"
    # sides untouched by the wall must not change
    assert nb[f"{ii}->{mi}"] == na[f"{ii}->{mi}"]
    assert nb[f"{mi}->{ki}"] == na[f"{mi}->{ki}"]
    return {
        "name": name,
        "base": [[c.real, c.imag] for c in base],
        "velocity": [[c.real, c.imag] for c in vel],
        "t_before": tb, "t_after": ta, "t_star": t_star,
        "moving": mi, "outer": [ii, ki],
        "counts_before": nb, "counts_after": na,
        "predicted_after_13": predicted,
    }


# ----------------------------------------------------------------------

def pair_fixture(coeffs, crits, i, j):
    theta, hits = connection_count(coeffs, crits, i, j)
    gens = []
    for launch_angle, sol in hits:
        gr, wind = grading_oracle(coeffs, crits, i, j, theta, launch_angle)
        act = action_oracle(coeffs, theta, sol, crits[i], crits[j])
        gens.append({"launch_angle": launch_angle % TWO_PI,
                     "grading": gr, "winding": wind, "action": act})
    return {"theta": theta % TWO_PI, "count_mod2": len(hits) % 2,
            "count_raw": len(hits), "generators": gens}


def main():
    fx = {"meta": {
        "generator": "tests/oracle/make_fixtures.py",
        "rtol": RTOL, "atol": ATOL,
        "launch_radius": LAUNCH, "capture_radius": CAPTURE,
        "grading_convention": "lift=[0,pi);short=(-pi,0]",
    }}

    # ----- cubic F = z^3/3 - z -----
    cubic = [0j, -1 + 0j, 0j, (1 / 3) + 0j]
    cd = crit_data(cubic)
    crits = [complex(*e["z"]) for e in cd]
    vals = [complex(*e["value"]) for e in cd]
    alpha = math.pi / 2
    ang, order = ordering(alpha, vals)
    pairs = {}
    for i in range(2):
        for j in range(2):
            if i != j:
                pairs[f"{i}->{j}"] = pair_fixture(cubic, crits, i, j)
    fx["cubic"] = {
        "coefficients": [[c.real, c.imag] for c in cubic],
        "alpha": alpha,
        "crit": cd,
        "clockwise_angles": ang,
        "order": order,
        "exceptional_angles": sorted(cmath.phase(v) % TWO_PI for v in vals),
        "pairs": pairs,
        # brute-force steepest-ascent direction of f_theta at x = +1 for a
        # couple of thetas; settles the launch-ray formula 2b = th - arg F''
        "ascent_checks": [
            {"x": [1.0, 0.0], "theta": th,
             "angle": ascent_check(cubic,
                                   crits[max(range(2),
                                             key=lambda q: crits[q].real)],
                                   th)}
            for th in (0.0, math.pi, 0.7)
        ],
    }

    # ----- quartic F = z^4/4 - z -----
    quartic = [0j, -1 + 0j, 0j, 0j, 0.25 + 0j]
    cd4 = crit_data(quartic)
    crits4 = [complex(*e["z"]) for e in cd4]
    vals4 = [complex(*e["value"]) for e in cd4]
    ang4, order4 = ordering(alpha, vals4)
    pairs4 = {}
    for i in range(3):
        for j in range(3):
            if i != j:
                pairs4[f"{i}->{j}"] = pair_fixture(quartic, crits4, i, j)
    fx["quartic"] = {
        "coefficients": [[c.real, c.imag] for c in quartic],
        "alpha": alpha,
        "crit": cd4,
        "clockwise_angles": ang4,
        "order": order4,
        "exceptional_angles": sorted(cmath.phase(v) % TWO_PI for v in vals4),
        "pairs": pairs4,
    }

    # ----- flow spot checks (capture / runaway), cubic, theta = 0 -----
    # theta=0 flows ascend Re F: from near +1 the real separatrix runs to -1
    fate, k, sol = shoot(cubic, 0.0, 0.999 + 0j, crits, None if False else
                         max(range(2), key=lambda q: crits[q].real))
    tgt = min(range(2), key=lambda q: crits[q].real)
    assert fate == "capture" and k == tgt
    fate2, _, _ = shoot(cubic, 0.0, 1.0 + 0.5j, crits,
                        max(range(2), key=lambda q: crits[q].real))
    assert fate2 == "runaway"
    fx["flow_cases"] = {
        "capture": {"z0": [0.999, 0.0], "theta": 0.0, "target": tgt},
        "runaway": {"z0": [1.0, 0.5], "theta": 0.0},
    }

    # ----- interior-witness polynomial (one value inside the hull) -----
    # F' = z(z-1)(z+1)(z-c): scan c until a value falls inside the hull
    witness = None
    for ci in np.linspace(0.3, 2.2, 39):
        c = complex(0.0, ci)
        # F' = z^4 - c z^3 - z^2 + c z; F = z^5/5 - c z^4/4 - z^3/3 + c z^2/2
        co = [0j, 0j, c / 2, -1 / 3 + 0j, -c / 4, 0.2 + 0j]
        cdw = crit_data(co)
        vs = [complex(*e["value"]) for e in cdw]
        for m in range(4):
            others = [vs[q] for q in range(4) if q != m]
            hull_ok = True
            # inside test for a triangle (orientation-consistent)
            o = [(others[(a + 1) % 3] - others[a]).conjugate() *
                 (vs[m] - others[a]) for a in range(3)]
            sg = [x.imag for x in o]
            if all(s > 1e-9 for s in sg) or all(s < -1e-9 for s in sg):
                witness = {"coefficients": [[w.real, w.imag] for w in co],
                           "witness": m}
                break
        if witness:
            break
    assert witness, "no interior-witness configuration found"
    fx["interior_witness"] = witness

    # ----- wall-crossing families -----
    base_a = [0j, -1 + 0j, 0j, 0j, 0.25 + 0j]          # z^4/4 - z
    vel_a = [0j, 0j, 0.5j, 0j, 0j]                     # + t * i z^2/2
    fam_a = family_fixture("quadratic-coefficient", base_a, vel_a, 0.0, 3.0)
    base_b = [0j, -1 + 0j, 0j, 0j, 0.25 + 0j]
    vel_b = [0j, 0j, 0j, 1j / 3, 0j]                   # + t * i z^3/3
    fam_b = family_fixture("cubic-coefficient", base_b, vel_b, 0.0, 3.0)
    fx["families"] = [fam_a, fam_b]

    with open("tests/fixtures/fixtures.json", "w") as f:
        json.dump(fx, f, indent=1, sort_keys=True)
    print("fixtures written")
    print("cubic counts:", {k: v["count_mod2"] for k, v in pairs.items()})
    print("quartic counts:", {k: v["count_mod2"] for k, v in pairs4.items()})
    print("cubic gradings:", {k: [g["grading"] for g in v["generators"]]
                              for k, v in pairs.items()})
    print("quartic gradings:", {k: [g["grading"] for g in v["generators"]]
                                for k, v in pairs4.items()})
    print("ascent checks:", fx["cubic"]["ascent_checks"])
    print("family A:", fam_a["counts_before"], "->", fam_a["counts_after"],
          "moving", fam_a["moving"], "outer", fam_a["outer"])
    print("family B:", fam_b["counts_before"], "->", fam_b["counts_after"],
          "moving", fam_b["moving"], "outer", fam_b["outer"])


if __name__ == "__main__":
    main()
