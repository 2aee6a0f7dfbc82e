"""Regenerate src/gesturebot/data/templates.json.

Eight hand skeletons in the MediaPipe 21-point topology (wrist 0; thumb 1-4;
index 5-8; middle 9-12; ring 13-16; pinky 17-20), laid out in normalized image
coordinates (y grows downward).  Designed to be geometrically distinct per
class rather than anatomically exact.
"""

import json
import math
import pathlib

import numpy as np

WRIST = np.array([0.5, 0.85])
UP = np.array([0.0, -1.0])
DOWN = np.array([0.0, 1.0])
LEFT = np.array([-1.0, 0.0])
RIGHT = np.array([1.0, 0.0])


def rot(v, deg):
    a = math.radians(deg)
    c, s = math.cos(a), math.sin(a)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def chain(base, direction, lengths):
    """Joint chain from (excluding) base along direction."""
    pts = []
    p = np.array(base, dtype=float)
    for L in lengths:
        p = p + np.asarray(direction) * L
        pts.append(p.copy())
    return pts


def finger(mcp, direction, curled, lengths=(0.09, 0.05, 0.04)):
    """MCP plus PIP/DIP/TIP.  Curled folds the distal joints back toward the palm."""
    mcp = np.asarray(mcp, dtype=float)
    d = np.asarray(direction, dtype=float)
    if not curled:
        rest = chain(mcp, d, lengths)
    else:
        pip = mcp + d * 0.035
        dip = pip - d * 0.045
        tip = dip - d * 0.04
        rest = [pip, dip, tip]
    return [mcp] + rest


def knuckles(origin, palm_dir, spread_dir):
    """Index/middle/ring/pinky MCP positions across the top of the palm."""
    top = np.asarray(origin) + np.asarray(palm_dir) * 0.20
    offs = [0.065, 0.022, -0.022, -0.065]
    return [top + np.asarray(spread_dir) * o for o in offs]


def hand(palm_dir, spread_dir, finger_flags, thumb_dir, thumb_curled, finger_dirs=None):
    """21-point skeleton: wrist + thumb chain + 4 finger chains."""
    pts = [WRIST.copy()]
    # thumb: CMC offset to the side of the palm, then 3 joints
    cmc = WRIST + np.asarray(spread_dir) * 0.09 + np.asarray(palm_dir) * 0.04
    if thumb_curled:
        td = np.asarray(thumb_dir, dtype=float)
        mcp = cmc + td * 0.04
        ip = mcp - np.asarray(spread_dir) * 0.05
        tip = ip - np.asarray(spread_dir) * 0.04
        pts += [cmc, mcp, ip, tip]
    else:
        pts += [cmc] + chain(cmc, thumb_dir, (0.06, 0.05, 0.04))
    mcps = knuckles(WRIST, palm_dir, spread_dir)
    for i, (mcp, curled) in enumerate(zip(mcps, finger_flags)):
        d = finger_dirs[i] if finger_dirs else palm_dir
        pts += finger(mcp, d, curled)
    assert len(pts) == 21
    return pts


def pointing(direction):
    """Index extended along `direction`, everything else curled."""
    spread = rot(direction, 90)
    return hand(
        palm_dir=direction,
        spread_dir=spread,
        finger_flags=[False, True, True, True],
        thumb_dir=spread,
        thumb_curled=True,
    )


templates = {
    "Fist": hand(UP, RIGHT, [True] * 4, UP, thumb_curled=True),
    "OpenPalm": hand(
        UP,
        RIGHT,
        [False] * 4,
        rot(UP, 55),
        thumb_curled=False,
        finger_dirs=[rot(UP, 14), rot(UP, 5), rot(UP, -5), rot(UP, -14)],
    ),
    "PointUp": pointing(UP),
    "PointDown": pointing(DOWN),
    "PointLeft": pointing(LEFT),
    "PointRight": pointing(RIGHT),
    "Peace": hand(
        UP,
        RIGHT,
        [False, False, True, True],
        UP,
        thumb_curled=True,
        finger_dirs=[rot(UP, 18), rot(UP, -18), UP, UP],
    ),
    "ThumbUp": hand(LEFT, UP, [True] * 4, UP, thumb_curled=False),
}

out = {
    "version": 1,
    "templates": {
        name: [[round(float(x), 6), round(float(y), 6)] for x, y in pts]
        for name, pts in templates.items()
    },
}

dest = pathlib.Path(__file__).resolve().parents[1] / "src/gesturebot/data/templates.json"
dest.write_text(json.dumps(out, indent=1) + "\n")
print(f"wrote {dest}")

# quick separation report
names = list(templates)
mats = {n: np.array(templates[n]) - np.array(templates[n])[0] for n in names}
dmin = 1e9
for i, a in enumerate(names):
    for b in names[i + 1 :]:
        d = np.linalg.norm(mats[a] - mats[b])
        dmin = min(dmin, d)
        print(f"{a:10s} vs {b:10s}: {d:.3f}")
print("min pairwise distance:", round(dmin, 3))
