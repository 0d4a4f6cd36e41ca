"""Derive the representative discrete-time case-study matrices.

Prints the nominal matrices used in src/boundmon/cases/*.model. Run once;
the model files are the source of truth afterwards.
"""

import numpy as np
from scipy.linalg import expm


def anesthesia(dt=0.1):
    # three-compartment propofol PK + effect site, constant infusion as 5th state
    k10, k12, k13, k21, k31, ke0, v1 = 0.384, 0.375, 0.196, 0.067, 0.0035, 0.456, 4.27
    ac = np.array([
        [-(k10 + k12 + k13), k21, k31, 0.0, 1.0 / v1],
        [k12, -k21, 0.0, 0.0, 0.0],
        [k13, 0.0, -k31, 0.0, 0.0],
        [ke0, 0.0, 0.0, -ke0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0],
    ])
    return expm(ac * dt)


def acc(dt=0.1):
    # follower speed v, gap h, lead speed vl, constant 1
    k1, k2, tau, h0 = 0.5, 0.8, 1.5, 5.0
    ac = np.array([
        [-(k1 * tau + k2), k1, k2, -k1 * h0],
        [-1.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ])
    return expm(ac * dt)


if __name__ == "__main__":
    np.set_printoptions(precision=6, suppress=True)
    for name, a in (("anesthesia", anesthesia()), ("acc", acc())):
        print(name)
        for row in np.round(a, 6):
            print(" ".join(repr(float(x)) for x in row))
