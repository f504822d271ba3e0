"""Brute-force oracle for the first canonical correlation of 2-D instances.

Searches unit-norm direction pairs v = (cos a, sin a), w = (cos b, sin b)
over a dense grid (then a finer grid around the coarse optimum) and keeps
the largest |corr(Xv, Yw)|.  No linear algebra beyond dot products.
"""
import numpy as np

INSTANCES = [
    (
        [[1.0, 0.2], [2.0, -0.4], [0.5, 1.3], [-1.2, 0.7], [0.3, -2.1], [1.7, 1.1], [-0.8, -0.6], [2.4, 0.9]],
        [[0.9, 1.1], [1.6, -0.2], [0.1, 2.0], [-1.5, 0.3], [0.8, -1.7], [1.2, 1.9], [-0.3, -1.4], [2.2, 0.1]],
    ),
    (
        [[3.1, -1.0], [0.4, 0.2], [-2.2, 1.5], [1.1, 2.8], [0.0, -0.9], [-1.7, -2.3], [2.5, 0.6]],
        [[-0.5, 2.0], [0.7, -0.1], [1.9, 1.4], [-2.6, 0.5], [0.2, 0.8], [1.0, -2.2], [-1.1, 1.3]],
    ),
    (
        [[0.1, 0.9], [0.8, 0.3], [1.5, -0.7], [-0.6, 1.8], [2.1, 2.0], [-1.9, 0.4], [0.7, -1.6], [1.2, 1.1], [-0.4, -0.2], [0.9, 0.5]],
        [[1.3, 0.2], [0.6, 1.0], [-0.9, 1.7], [2.0, -0.8], [1.4, 2.3], [0.3, -1.9], [-1.6, 0.6], [1.1, 0.9], [-0.2, -0.7], [0.5, 0.4]],
    ),
    (
        [[2.0, 1.0], [1.0, 3.0], [-1.0, 0.5], [0.0, -2.0], [3.0, 2.5], [-2.0, -1.5]],
        [[1.5, -0.5], [2.5, 1.0], [0.5, 0.0], [-1.5, -1.0], [2.0, 2.0], [-2.5, 0.5]],
    ),
    (
        [[0.3, -1.2], [1.8, 0.4], [-0.7, 2.2], [2.6, -0.3], [-1.4, -0.8], [0.9, 1.5], [-2.1, 0.1], [1.0, -2.4], [0.2, 0.6]],
        [[-1.1, 0.5], [0.4, 1.9], [1.7, -1.3], [0.8, 0.2], [-0.6, -2.0], [2.3, 1.1], [-1.8, 0.9], [0.1, -0.4], [1.2, 1.6]],
    ),
]


def corr_grid(X, Y, a, b):
    Xc = X - X.mean(axis=0)
    Yc = Y - Y.mean(axis=0)
    V = np.stack([np.cos(a), np.sin(a)])  # 2 x na
    W = np.stack([np.cos(b), np.sin(b)])  # 2 x nb
    P = Xc @ V
    Q = Yc @ W
    P = P / np.linalg.norm(P, axis=0)
    Q = Q / np.linalg.norm(Q, axis=0)
    return np.abs(P.T @ Q)  # na x nb


def search(X, Y):
    n1 = 1440
    a = np.linspace(0.0, np.pi, n1, endpoint=False)
    b = np.linspace(0.0, np.pi, n1, endpoint=False)
    C = corr_grid(X, Y, a, b)
    i, j = np.unravel_index(np.argmax(C), C.shape)
    h = np.pi / n1
    a2 = np.linspace(a[i] - 2 * h, a[i] + 2 * h, 801)
    b2 = np.linspace(b[j] - 2 * h, b[j] + 2 * h, 801)
    C2 = corr_grid(X, Y, a2, b2)
    i2, j2 = np.unravel_index(np.argmax(C2), C2.shape)
    return C2[i2, j2], a2[i2], b2[j2]


if __name__ == "__main__":
    for X, Y in INSTANCES:
        rho, a, b = search(np.array(X), np.array(Y))
        print(f"{{{float(rho)!r}, {float(a)!r}, {float(b)!r}}},")
