#!/usr/bin/env python3
"""Fine-step backward Euler oracle for the single-machine 2-bus toy case
frozen in tests/test_sim_di.cpp.

System: bus 1 slack (V=1, angle 0), bus 2 generator (V=1, H=15 s), one
lossless branch x=1.0 (B = [[-1,1],[1,-1]], G=0).  Base load at bus 2 is
P_L=0.1, Q_L=0, dispatch 0.3, so the initial angle solves sin(d0)=0.2 and
Pm=0.3.  Disturbance: load scaled by 1.5 on [0.5, 2.0).  Pe(d)=P_L+sin(d).

Integrates with h=1e-4 and prints delta at every 0.05 s grid time over
[0, 3]; those 61 values are frozen into the C++ test.  Also runs the same
scheme at h=0.05 to preview the expected coarse-vs-fine gap.
"""
import math

OMEGA_S = 2.0 * math.pi * 60.0
H_INERTIA = 15.0
M = 2.0 * H_INERTIA / OMEGA_S
PM = 0.3
BASE_PL = 0.1


def p_load(t):
    return BASE_PL * 1.5 if 0.5 - 1e-12 <= t < 2.0 - 1e-12 else BASE_PL


def be_run(h, t_end):
    steps = round(t_end / h)
    d = math.asin(0.2)
    w = OMEGA_S
    out = [(0.0, d, w)]
    for s in range(1, steps + 1):
        t1 = s * h
        pl = p_load(t1)
        # scalar Newton on w' with d' = d + h (w' - OMEGA_S)
        wn = w
        for _ in range(100):
            dn = d + h * (wn - OMEGA_S)
            f = wn - w - (h / M) * (PM - pl - math.sin(dn))
            fp = 1.0 + (h / M) * math.cos(dn) * h
            step = f / fp
            wn -= step
            if abs(step) < 1e-14:
                break
        w = wn
        d = d + h * (w - OMEGA_S)
        out.append((t1, d, w))
    return out


def main():
    fine = be_run(1e-4, 3.0)
    coarse = be_run(0.05, 3.0)
    grid = {round(t / 0.05): d for t, d, _ in fine
            if abs(t / 0.05 - round(t / 0.05)) < 1e-6}
    print("fine-oracle delta at 0.05 s grid times (t = i*0.05, i=0..60):")
    vals = [grid[i] for i in range(61)]
    for i in range(0, 61, 4):
        chunk = ", ".join(f"{v:.12f}" for v in vals[i:i + 4])
        print("  " + chunk + ",")
    worst = max(abs(grid[round(t / 0.05)] - d) for t, d, _ in coarse)
    print(f"\npreview: max |coarse(h=0.05) - fine| over grid = {worst:.6f} rad")


if __name__ == "__main__":
    main()
