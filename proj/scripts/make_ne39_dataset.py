#!/usr/bin/env python3
"""Emit data/ne39.json, the bundled New England 39-bus network.

Bus, branch, and generator data are the standard New England 10-machine
39-bus test case in the edition distributed with MATPOWER/PYPOWER as
`case39` (100 MVA base, 60 Hz).  Inertia constants are the classic
10-machine dynamic data set (100 MVA base).  The slack is placed at bus 39,
the aggregated external-system machine, which also serves as the angle
reference (delta0 = 0).
"""
import json
import os

# bus id, Pd (MW), Qd (MVAr)
BUS_LOAD = {
    1: (97.6, 44.2), 2: (0.0, 0.0), 3: (322.0, 2.4), 4: (500.0, 184.0),
    5: (0.0, 0.0), 6: (0.0, 0.0), 7: (233.8, 84.0), 8: (522.0, 176.6),
    9: (6.5, -66.6), 10: (0.0, 0.0), 11: (0.0, 0.0), 12: (8.53, 88.0),
    13: (0.0, 0.0), 14: (0.0, 0.0), 15: (320.0, 153.0), 16: (329.0, 32.3),
    17: (0.0, 0.0), 18: (158.0, 30.0), 19: (0.0, 0.0), 20: (680.0, 103.0),
    21: (274.0, 115.0), 22: (0.0, 0.0), 23: (247.5, 84.6),
    24: (308.6, -92.2), 25: (224.0, 47.2), 26: (139.0, 17.0),
    27: (281.0, 75.5), 28: (206.0, 27.6), 29: (283.5, 26.9),
    30: (0.0, 0.0), 31: (9.2, 4.6), 32: (0.0, 0.0), 33: (0.0, 0.0),
    34: (0.0, 0.0), 35: (0.0, 0.0), 36: (0.0, 0.0), 37: (0.0, 0.0),
    38: (0.0, 0.0), 39: (1104.0, 250.0),
}

# from, to, r, x, b (total line charging), tap ratio (0 = line)
BRANCHES = [
    (1, 2, 0.0035, 0.0411, 0.6987, 0),
    (1, 39, 0.0010, 0.0250, 0.7500, 0),
    (2, 3, 0.0013, 0.0151, 0.2572, 0),
    (2, 25, 0.0070, 0.0086, 0.1460, 0),
    (2, 30, 0.0000, 0.0181, 0.0000, 1.025),
    (3, 4, 0.0013, 0.0213, 0.2214, 0),
    (3, 18, 0.0011, 0.0133, 0.2138, 0),
    (4, 5, 0.0008, 0.0128, 0.1342, 0),
    (4, 14, 0.0008, 0.0129, 0.1382, 0),
    (5, 6, 0.0002, 0.0026, 0.0434, 0),
    (5, 8, 0.0008, 0.0112, 0.1476, 0),
    (6, 7, 0.0006, 0.0092, 0.1130, 0),
    (6, 11, 0.0007, 0.0082, 0.1389, 0),
    (6, 31, 0.0000, 0.0250, 0.0000, 1.070),
    (7, 8, 0.0004, 0.0046, 0.0780, 0),
    (8, 9, 0.0023, 0.0363, 0.3804, 0),
    (9, 39, 0.0010, 0.0250, 1.2000, 0),
    (10, 11, 0.0004, 0.0043, 0.0729, 0),
    (10, 13, 0.0004, 0.0043, 0.0729, 0),
    (10, 32, 0.0000, 0.0200, 0.0000, 1.070),
    (12, 11, 0.0016, 0.0435, 0.0000, 1.006),
    (12, 13, 0.0016, 0.0435, 0.0000, 1.006),
    (13, 14, 0.0009, 0.0101, 0.1723, 0),
    (14, 15, 0.0018, 0.0217, 0.3660, 0),
    (15, 16, 0.0009, 0.0094, 0.1710, 0),
    (16, 17, 0.0007, 0.0089, 0.1342, 0),
    (16, 19, 0.0016, 0.0195, 0.3040, 0),
    (16, 21, 0.0008, 0.0135, 0.2548, 0),
    (16, 24, 0.0003, 0.0059, 0.0680, 0),
    (17, 18, 0.0007, 0.0082, 0.1319, 0),
    (17, 27, 0.0013, 0.0173, 0.3216, 0),
    (19, 20, 0.0007, 0.0138, 0.0000, 1.060),
    (19, 33, 0.0007, 0.0142, 0.0000, 1.070),
    (20, 34, 0.0009, 0.0180, 0.0000, 1.009),
    (21, 22, 0.0008, 0.0140, 0.2565, 0),
    (22, 23, 0.0006, 0.0096, 0.1846, 0),
    (22, 35, 0.0000, 0.0143, 0.0000, 1.025),
    (23, 24, 0.0022, 0.0350, 0.3610, 0),
    (23, 36, 0.0005, 0.0272, 0.0000, 1.000),
    (25, 26, 0.0032, 0.0323, 0.5310, 0),
    (25, 37, 0.0006, 0.0232, 0.0000, 1.025),
    (26, 27, 0.0014, 0.0147, 0.2396, 0),
    (26, 28, 0.0043, 0.0474, 0.7802, 0),
    (26, 29, 0.0057, 0.0625, 1.0290, 0),
    (28, 29, 0.0014, 0.0151, 0.2490, 0),
    (29, 38, 0.0008, 0.0156, 0.0000, 1.025),
]

# bus, Pg (MW), Vg (pu), H (s, 100 MVA base)
GENERATORS = [
    (30, 250.0, 1.0499, 42.0),
    (31, 677.871, 0.982, 30.3),
    (32, 650.0, 0.9841, 35.8),
    (33, 632.0, 0.9972, 28.6),
    (34, 508.0, 1.0123, 26.0),
    (35, 650.0, 1.0494, 34.8),
    (36, 560.0, 1.0636, 26.4),
    (37, 540.0, 1.0275, 24.3),
    (38, 830.0, 1.0265, 34.5),
    (39, 1000.0, 1.0300, 500.0),
]

SLACK_BUS = 39
MVA_BASE = 100.0


def main():
    gen_buses = {g[0]: g for g in GENERATORS}
    buses = []
    for bus_id in sorted(BUS_LOAD):
        pd, qd = BUS_LOAD[bus_id]
        if bus_id == SLACK_BUS:
            kind, v0 = "slack", gen_buses[bus_id][2]
        elif bus_id in gen_buses:
            kind, v0 = "generator", gen_buses[bus_id][2]
        else:
            kind, v0 = "load", 1.0
        buses.append({
            "id": bus_id, "kind": kind, "v0": v0, "delta0": 0.0,
            "p_load": pd / MVA_BASE, "q_load": qd / MVA_BASE,
        })

    branches = []
    for f, t, r, x, b, tap in BRANCHES:
        rec = {"from": f, "to": t, "r": r, "x": x, "b_charging": b}
        if tap:
            rec["tap"] = tap
        branches.append(rec)

    generators = [
        {"bus": bus, "h_inertia": h, "p_dispatch": pg / MVA_BASE}
        for bus, pg, _vg, h in GENERATORS
    ]

    doc = {
        "name": "New England 10-machine 39-bus system",
        "source": "Standard New England 39-bus test case, MATPOWER/PYPOWER "
                  "case39 edition (100 MVA base, 60 Hz); inertia constants "
                  "from the classic 10-machine dynamic data set; slack/angle "
                  "reference moved to bus 39 (external-system equivalent).",
        "mva_base": MVA_BASE,
        "frequency_hz": 60.0,
        "buses": buses,
        "branches": branches,
        "generators": generators,
    }

    out = os.path.join(os.path.dirname(__file__), "..", "data", "ne39.json")
    with open(out, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    print(f"wrote {os.path.normpath(out)}: {len(buses)} buses, "
          f"{len(branches)} branches, {len(generators)} generators")


if __name__ == "__main__":
    main()
