#!/usr/bin/env python3
"""Builds data/us_states.json: a stylized 50-state US geography.

Each contiguous state is the Voronoi cell of its approximate geographic
center, clipped to a convex outline of the lower 48. Alaska and Hawaii are
hand-drawn insets. Adjacency is the real land-border list (corner touches
excluded) and subareas are the four Census regions.

Coordinates: x grows eastward, y grows southward (image convention), one
unit is roughly one degree of latitude.
"""

import json
import math
import sys

COS_LAT = math.cos(math.radians(38.0))

# postal code, display name, lat, lon (label seed)
STATES = [
    ("AL", "Alabama", 32.8, -86.8), ("AZ", "Arizona", 34.3, -111.7),
    ("AR", "Arkansas", 34.9, -92.4), ("CA", "California", 37.2, -119.4),
    ("CO", "Colorado", 39.0, -105.5), ("CT", "Connecticut", 41.6, -72.7),
    ("DE", "Delaware", 38.9, -75.45), ("FL", "Florida", 28.6, -82.4),
    ("GA", "Georgia", 32.7, -83.4), ("ID", "Idaho", 44.4, -114.6),
    ("IL", "Illinois", 40.0, -89.2), ("IN", "Indiana", 39.9, -86.3),
    ("IA", "Iowa", 42.1, -93.5), ("KS", "Kansas", 38.5, -98.4),
    ("KY", "Kentucky", 37.5, -85.3), ("LA", "Louisiana", 31.1, -92.0),
    ("ME", "Maine", 45.4, -69.2), ("MD", "Maryland", 39.1, -76.9),
    ("MA", "Massachusetts", 42.35, -72.2), ("MI", "Michigan", 44.3, -85.4),
    ("MN", "Minnesota", 46.3, -94.3), ("MS", "Mississippi", 32.7, -89.7),
    ("MO", "Missouri", 38.4, -92.5), ("MT", "Montana", 47.0, -109.6),
    ("NE", "Nebraska", 41.5, -99.8), ("NV", "Nevada", 39.3, -116.6),
    ("NH", "New Hampshire", 43.7, -71.6), ("NJ", "New Jersey", 40.2, -74.6),
    ("NM", "New Mexico", 34.4, -106.1), ("NY", "New York", 42.9, -75.5),
    ("NC", "North Carolina", 35.6, -79.4), ("ND", "North Dakota", 47.5, -100.5),
    ("OH", "Ohio", 40.3, -82.8), ("OK", "Oklahoma", 35.6, -97.5),
    ("OR", "Oregon", 43.9, -120.6), ("PA", "Pennsylvania", 40.9, -77.8),
    ("RI", "Rhode Island", 41.6, -71.35), ("SC", "South Carolina", 33.9, -80.9),
    ("SD", "South Dakota", 44.4, -100.2), ("TN", "Tennessee", 35.9, -86.4),
    ("TX", "Texas", 31.5, -99.3), ("UT", "Utah", 39.3, -111.7),
    ("VT", "Vermont", 44.1, -72.7), ("VA", "Virginia", 37.5, -78.9),
    ("WA", "Washington", 47.4, -120.5), ("WV", "West Virginia", 38.6, -80.6),
    ("WI", "Wisconsin", 44.6, -89.9), ("WY", "Wyoming", 43.0, -107.6),
]

OUTLINE = [
    (48.4, -124.7), (49.0, -123.0), (49.0, -95.0), (48.0, -89.5),
    (47.5, -67.0), (44.5, -67.0), (41.5, -70.0), (38.5, -75.0),
    (35.2, -75.5), (25.0, -80.0), (25.0, -81.5), (25.8, -97.0),
    (32.5, -117.0), (40.5, -124.4),
]

BORDERS = {
    "AL": "FL GA MS TN", "AZ": "CA NV NM UT", "AR": "LA MS MO OK TN TX",
    "CA": "AZ NV OR", "CO": "KS NE NM OK UT WY", "CT": "MA NY RI",
    "DE": "MD NJ PA", "FL": "AL GA", "GA": "AL FL NC SC TN",
    "ID": "MT NV OR UT WA WY", "IL": "IN IA KY MO WI", "IN": "IL KY MI OH",
    "IA": "IL MN MO NE SD WI", "KS": "CO MO NE OK", "KY": "IL IN MO OH TN VA WV",
    "LA": "AR MS TX", "ME": "NH", "MD": "DE PA VA WV", "MA": "CT NH NY RI VT",
    "MI": "IN OH WI", "MN": "IA ND SD WI", "MS": "AL AR LA TN",
    "MO": "AR IL IA KS KY NE OK TN", "MT": "ID ND SD WY", "NE": "CO IA KS MO SD WY",
    "NV": "AZ CA ID OR UT", "NH": "ME MA VT", "NJ": "DE NY PA", "NM": "AZ CO OK TX",
    "NY": "CT MA NJ PA VT", "NC": "GA SC TN VA", "ND": "MN MT SD",
    "OH": "IN KY MI PA WV", "OK": "AR CO KS MO NM TX", "OR": "CA ID NV WA",
    "PA": "DE MD NJ NY OH WV", "RI": "CT MA", "SC": "GA NC", "SD": "IA MN MT ND NE WY",
    "TN": "AL AR GA KY MS MO NC VA", "TX": "AR LA NM OK", "UT": "AZ CO ID NV WY",
    "VT": "MA NH NY", "VA": "KY MD NC TN WV", "WA": "ID OR", "WV": "KY MD OH PA VA",
    "WI": "IL IA MI MN", "WY": "CO ID MT NE SD UT", "AK": "", "HI": "",
}

SUBAREAS = {
    "Northeast": "CT ME MA NH RI VT NJ NY PA",
    "Midwest": "IL IN MI OH WI IA KS MN MO NE ND SD",
    "South": "DE FL GA MD NC SC VA WV AL KY MS TN AR LA OK TX",
    "West": "AZ CO ID MT NV NM UT WY AK CA HI OR WA",
}


def project(lat, lon):
    return ((lon + 125.0) * COS_LAT, 50.0 - lat)


def clip(poly, a, b, c):
    """Keeps the part of poly with a*x + b*y <= c."""
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp = a * p[0] + b * p[1] - c
        fq = a * q[0] + b * q[1] - c
        if fp <= 0:
            out.append(p)
        if (fp < 0 < fq) or (fq < 0 < fp):
            s = fp / (fp - fq)
            out.append((p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])))
    return out


def convex_hull(points):
    pts = sorted(set(points))

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def seg_distance(p, a, b):
    ax, ay = b[0] - a[0], b[1] - a[1]
    t = ((p[0] - a[0]) * ax + (p[1] - a[1]) * ay) / (ax * ax + ay * ay)
    t = max(0.0, min(1.0, t))
    dx, dy = a[0] + t * ax - p[0], a[1] + t * ay - p[1]
    return math.hypot(dx, dy)


def rnd(p):
    return [round(p[0], 3), round(p[1], 3)]


def closed(ring):
    pts = [rnd(p) for p in ring]
    return pts + [pts[0]]


def main(out_path):
    hull = convex_hull([project(lat, lon) for lat, lon in OUTLINE])
    seeds = {code: project(lat, lon) for code, _, lat, lon in STATES}
    regions = []
    min_clearance = (1e9, None)
    for code, name, _, _ in STATES:
        s = seeds[code]
        cell = list(hull)
        for other, o in seeds.items():
            if other == code:
                continue
            # half-plane of points closer to s than to o
            a, b = o[0] - s[0], o[1] - s[1]
            c = (o[0] ** 2 + o[1] ** 2 - s[0] ** 2 - s[1] ** 2) / 2.0
            cell = clip(cell, a, b, c)
        ring = closed(cell)
        clearance = min(seg_distance(s, ring[i], ring[i + 1]) for i in range(len(ring) - 1))
        min_clearance = min(min_clearance, (clearance, code))
        regions.append({"id": code, "name": name, "rings": [ring],
                        "label_point": rnd(s)})

    alaska = [(0.8, 19.8), (4.5, 19.4), (6.6, 20.6), (6.9, 23.5), (5.0, 24.6),
              (3.0, 25.6), (1.0, 24.8), (0.5, 22.0)]
    regions.append({"id": "AK", "name": "Alaska", "rings": [closed(alaska)],
                    "label_point": [3.6, 22.3]})
    hawaii = [
        [(12.2, 25.0), (13.8, 25.2), (14.0, 26.6), (12.6, 27.0), (11.8, 26.0)],
        [(10.2, 23.8), (11.2, 23.9), (11.1, 24.6), (10.1, 24.5)],
        [(8.4, 23.1), (9.1, 23.0), (9.2, 23.6), (8.5, 23.7)],
    ]
    regions.append({"id": "HI", "name": "Hawaii", "rings": [closed(r) for r in hawaii],
                    "label_point": [12.9, 26.0]})

    regions.sort(key=lambda r: r["name"])
    for r in regions:
        r["neighbors"] = sorted(BORDERS[r["id"]].split())

    doc = {
        "name": "United States",
        "regions": regions,
        "subareas": {k: sorted(v.split()) for k, v in SUBAREAS.items()},
    }
    with open(out_path, "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")
    print(f"wrote {len(regions)} regions; min label clearance {min_clearance[0]:.3f} ({min_clearance[1]})",
          file=sys.stderr)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/us_states.json")
