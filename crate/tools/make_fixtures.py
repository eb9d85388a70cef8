#!/usr/bin/env python3
"""Writes the six synthetic Solomon-format fixture files used by the tests.

The files follow the classic Solomon layout (name, VEHICLE block, CUSTOMER
table) and reproduce each class's signature structure at 10 customers:

  c1  clustered, tight staggered windows that chain into one feasible tour,
      capacity is the only constraint that ever splits the cluster
  c2  the same cluster with a long horizon, wide windows and slack capacity
  r1  scattered customers, moderate windows, total demand tuned so that a
      fully active day needs a third vehicle
  r2  the same scatter with a long horizon and slack capacity
  rc1 a mix: three mutually unreachable tight windows (any day activating
      all three needs three vehicles), one exclusive tight pair, and five
      flexible fillers near the depot
  rc2 the same mix with a long horizon and slack capacity

Regenerate with:  python3 tools/make_fixtures.py
"""

import os

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "crates", "convrptw", "tests", "fixtures")

# (x, y, demand, ready, due, service)
C1_DEPOT = (40, 50, 0, 0, 1236, 0)
C1 = [
    (45, 68, 10, 912, 967, 90),
    (45, 70, 20, 825, 870, 90),
    (42, 66, 10, 65, 146, 90),
    (42, 68, 10, 727, 782, 90),
    (42, 65, 10, 15, 67, 90),
    (40, 69, 20, 621, 702, 90),
    (40, 66, 20, 170, 225, 90),
    (38, 68, 20, 255, 324, 90),
    (38, 70, 10, 534, 605, 90),
    (35, 66, 10, 357, 410, 90),
]

C2_DEPOT = (40, 50, 0, 0, 3390, 0)
C2 = [
    (x, y, d, 80 * i, 80 * i + 1800, 90)
    for i, (x, y, d, _, _, _) in enumerate(C1)
]

R1_DEPOT = (35, 35, 0, 0, 230, 0)
R1 = [
    (41, 49, 30, 120, 175, 10),
    (22, 20, 27, 30, 90, 10),
    (55, 45, 25, 85, 145, 10),
    (52, 22, 23, 110, 170, 10),
    (15, 30, 22, 25, 80, 10),
    (25, 30, 21, 95, 155, 10),
    (20, 50, 19, 60, 125, 10),
    (10, 43, 17, 130, 190, 10),
    (55, 60, 16, 45, 110, 10),
    (30, 60, 15, 75, 140, 10),
]

R2_DEPOT = (35, 35, 0, 0, 1000, 0)
R2 = [
    (x, y, d, 60 * i, 60 * i + 400, 10)
    for i, (x, y, d, _, _, _) in enumerate(R1)
]

RC1_DEPOT = (40, 40, 0, 0, 240, 0)
RC1 = [
    (10, 60, 15, 100, 112, 10),
    (62, 10, 15, 100, 112, 10),
    (65, 65, 15, 100, 112, 10),
    (12, 58, 12, 40, 52, 10),
    (60, 12, 12, 40, 52, 10),
    (38, 42, 18, 0, 220, 10),
    (42, 38, 16, 0, 220, 10),
    (36, 36, 14, 10, 225, 10),
    (44, 44, 13, 5, 222, 10),
    (40, 36, 10, 0, 228, 10),
]

RC2_DEPOT = (40, 40, 0, 0, 960, 0)
RC2 = [
    (x, y, d, 55 * i, 55 * i + 350, 10)
    for i, (x, y, d, _, _, _) in enumerate(RC1)
]

FILES = {
    "c1.txt": ("C1-SYN", 25, 200, C1_DEPOT, C1),
    "c2.txt": ("C2-SYN", 25, 700, C2_DEPOT, C2),
    "r1.txt": ("R1-SYN", 25, 200, R1_DEPOT, R1),
    "r2.txt": ("R2-SYN", 25, 1000, R2_DEPOT, R2),
    "rc1.txt": ("RC1-SYN", 25, 200, RC1_DEPOT, RC1),
    "rc2.txt": ("RC2-SYN", 25, 1000, RC2_DEPOT, RC2),
}


def render(name, vehicles, capacity, depot, customers):
    lines = [name, "", "VEHICLE", "NUMBER     CAPACITY", f"  {vehicles}        {capacity}", ""]
    lines.append("CUSTOMER")
    lines.append(
        "CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME  DUE DATE   SERVICE TIME"
    )
    lines.append("")
    for cid, (x, y, d, ready, due, service) in enumerate([depot] + list(customers)):
        lines.append(
            f"{cid:>5} {x:>10} {y:>10} {d:>10} {ready:>11} {due:>10} {service:>13}"
        )
    return "\n".join(lines) + "\n"


def main():
    os.makedirs(OUT_DIR, exist_ok=True)
    for filename, spec in FILES.items():
        path = os.path.join(OUT_DIR, filename)
        with open(path, "w") as f:
            f.write(render(*spec))
        print(f"wrote {os.path.relpath(path)}")


if __name__ == "__main__":
    main()
