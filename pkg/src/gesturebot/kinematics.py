"""UR5 kinematics: standard DH forward kinematics, geometric Jacobian, and
damped-least-squares Cartesian velocity resolution.

The default DH constants are the published UR5 values (vendor data, editable
via config).  Each joint transform is Rz(theta) Tz(d) Tx(a) Rx(alpha).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DHTable:
    a: tuple[float, ...] = (0.0, -0.425, -0.39225, 0.0, 0.0, 0.0)
    d: tuple[float, ...] = (0.089159, 0.0, 0.0, 0.10915, 0.09465, 0.0823)
    alpha: tuple[float, ...] = (np.pi / 2, 0.0, 0.0, np.pi / 2, -np.pi / 2, 0.0)

    def __post_init__(self):
        if not (len(self.a) == len(self.d) == len(self.alpha) == 6):
            raise ValueError("DH table needs 6 rows")
        for row in (self.a, self.d, self.alpha):
            if not all(np.isfinite(row)):
                raise ValueError("non-finite DH constant")


UR5_DH = DHTable()


def dh_transform(theta: float, a: float, d: float, alpha: float) -> np.ndarray:
    ct, st = np.cos(theta), np.sin(theta)
    ca, sa = np.cos(alpha), np.sin(alpha)
    return np.array(
        [
            [ct, -st * ca, st * sa, a * ct],
            [st, ct * ca, -ct * sa, a * st],
            [0.0, sa, ca, d],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def _frames(q: np.ndarray, dh: DHTable) -> list[np.ndarray]:
    """Cumulative transforms T_0^0 .. T_0^6."""
    Ts = [np.eye(4)]
    T = np.eye(4)
    for i in range(6):
        T = T @ dh_transform(q[i], dh.a[i], dh.d[i], dh.alpha[i])
        Ts.append(T)
    return Ts


def forward_kinematics(q: np.ndarray, dh: DHTable = UR5_DH) -> tuple[np.ndarray, np.ndarray]:
    """Flange pose: (position 3-vector, rotation matrix)."""
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (6,) or not np.all(np.isfinite(q)):
        raise ValueError(f"bad joint vector: {q}")
    T = _frames(q, dh)[-1]
    return T[:3, 3].copy(), T[:3, :3].copy()


def jacobian(q: np.ndarray, dh: DHTable = UR5_DH) -> np.ndarray:
    """Geometric Jacobian, linear rows over angular rows (6x6)."""
    q = np.asarray(q, dtype=np.float64)
    Ts = _frames(q, dh)
    o_n = Ts[-1][:3, 3]
    J = np.zeros((6, 6))
    for i in range(6):
        z = Ts[i][:3, 2]
        o = Ts[i][:3, 3]
        J[:3, i] = np.cross(z, o_n - o)
        J[3:, i] = z
    return J


def resolve_velocity(
    v: np.ndarray, q: np.ndarray, dh: DHTable = UR5_DH, damping: float = 0.05
) -> np.ndarray:
    """Damped-least-squares joint velocity for a Cartesian linear velocity.

    qdot = Jv^T (Jv Jv^T + lambda^2 I)^-1 v, using the 3x6 linear block, so
    the solution stays bounded through singularities.
    """
    v = np.asarray(v, dtype=np.float64)
    Jv = jacobian(q, dh)[:3, :]
    A = Jv @ Jv.T + damping**2 * np.eye(3)
    return Jv.T @ np.linalg.solve(A, v)


def reach_bound(dh: DHTable = UR5_DH) -> float:
    return float(sum(abs(x) for x in dh.a) + sum(abs(x) for x in dh.d))
