"""Pure numpy implementations of the hot kernels (fallback backend)."""
import numpy as np

_CHUNK = 1 << 16


def world_marginals(probs, n):
    out = np.empty(n)
    for i in range(n):
        out[i] = probs.reshape(1 << (n - 1 - i), 2, 1 << i)[:, 1, :].sum()
    return out


def world_affine(coeffs, const, n):
    out = np.empty(1 << n)
    out[0] = const
    for i in range(n):
        half = 1 << i
        np.add(out[:half], coeffs[i], out=out[half:2 * half])
    return out


def world_product(values, n):
    out = np.empty(1 << n)
    out[0] = 1.0
    for i in range(n):
        half = 1 << i
        np.multiply(out[:half], values[i], out=out[half:2 * half])
        out[:half] *= 1.0 - values[i]
    return out


def world_gram(weights, n):
    N = 1 << n
    gram = np.zeros((n + 1, n + 1))
    shifts = np.arange(n, dtype=np.int64)
    for start in range(0, N, _CHUNK):
        stop = min(N, start + _CHUNK)
        d = weights[start:stop]
        w = np.arange(start, stop, dtype=np.int64)
        phi = np.empty((stop - start, n + 1))
        phi[:, 0] = 1.0
        phi[:, 1:] = (w[:, None] >> shifts) & 1
        gram += (phi * d[:, None]).T @ phi
    return gram


def qr_drop(R, J, k, q):
    """Delete column ``k`` of the leading ``q x q`` block of R and retriangularize.

    Rotations are mirrored onto the columns of J so that ``J[:, :q-1] @ R``
    still reproduces the remaining active normals.
    """
    R[:q, k:q - 1] = R[:q, k + 1:q]
    R[:q, q - 1] = 0.0
    for i in range(k, q - 1):
        a = R[i, i]
        b = R[i + 1, i]
        r = np.hypot(a, b)
        if r == 0.0:
            continue
        c, s = a / r, b / r
        ri = R[i, i:q - 1].copy()
        R[i, i:q - 1] = c * ri + s * R[i + 1, i:q - 1]
        R[i + 1, i:q - 1] = -s * ri + c * R[i + 1, i:q - 1]
        R[i + 1, i] = 0.0
        ji = J[:, i].copy()
        J[:, i] = c * ji + s * J[:, i + 1]
        J[:, i + 1] = -s * ji + c * J[:, i + 1]
