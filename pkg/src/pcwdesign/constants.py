"""Physical constants and unit conversions used across the package."""

import math

SPEED_OF_LIGHT = 299_792_458.0  # m/s

NM = 1e-9  # metres per nanometre
UM_PER_NM = 1e-3

LATTICE_ANGLE_DEFAULT = math.pi / 3


def nm_to_m(x: float) -> float:
    return x * NM


def m_to_nm(x: float) -> float:
    return x / NM


def nm_to_um(x: float) -> float:
    return x * UM_PER_NM


def um_to_nm(x: float) -> float:
    return x / UM_PER_NM


def deg_to_rad(x: float) -> float:
    return math.radians(x)


def rad_to_deg(x: float) -> float:
    return math.degrees(x)
