import cmath

from app.exceptions import GammaPoleError

# Lanczos coefficients for g = 7, n = 9
LANCZOS_G = 7
LANCZOS_P = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
POLE_TOL = 1e-14


def complex_gamma(z: complex) -> complex:
    """Gamma(z) by the Lanczos approximation, reflected for Re z < 1/2"""
    z = complex(z)
    nearest = round(z.real)
    if nearest <= 0 and abs(z - nearest) < POLE_TOL:
        raise GammaPoleError(f"Gamma has a pole at {nearest}", z=z)
    if z.real < 0.5:
        return cmath.pi / (cmath.sin(cmath.pi * z) * complex_gamma(1 - z))
    z -= 1
    x = LANCZOS_P[0]
    for i, p in enumerate(LANCZOS_P[1:], start=1):
        x += p / (z + i)
    t = z + LANCZOS_G + 0.5
    return cmath.sqrt(2 * cmath.pi) * t ** (z + 0.5) * cmath.exp(-t) * x


def reciprocal_gamma(z: complex) -> complex:
    """1/Gamma(z), zero at the poles of Gamma"""
    try:
        return 1 / complex_gamma(z)
    except GammaPoleError:
        return 0j
