"""
Numba pixel loops for the sampling-based Retinex estimators.

Randomness comes from a stateless counter hash of (seed, pixel, path/spray, step),
so every pixel draws the same samples whatever the thread count or the order in
which rows are scheduled.
"""

import math

import numpy as np
from numba import njit, prange

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_ONE = np.uint64(1)
_SH2 = np.uint64(2)
_SH27 = np.uint64(27)
_SH30 = np.uint64(30)
_SH31 = np.uint64(31)
_SH32 = np.uint64(32)
_MASK2 = np.uint64(3)
_MASK32 = np.uint64(0xFFFFFFFF)
_INV_2_32 = 1.0 / 4294967296.0
_TWO_PI = 2.0 * math.pi


@njit(cache=True, nogil=True)
def _mix64(z):
    z = (z ^ (z >> _SH30)) * _M1
    z = (z ^ (z >> _SH27)) * _M2
    return z ^ (z >> _SH31)


@njit(cache=True, nogil=True)
def hash_step(h, a):
    """One splitmix64 round absorbing counter a into state h."""
    return _mix64(h + _GAMMA * (np.uint64(a) + _ONE))


@njit(cache=True, nogil=True)
def hash_prefix(seed, a, b):
    """State after absorbing (a, b); finish with hash_step(prefix, c)."""
    return hash_step(hash_step(np.uint64(seed), a), b)


@njit(cache=True, nogil=True)
def counter_hash(seed, a, b, c):
    """64-bit hash of (seed, a, b, c) built from splitmix64 finaliser rounds."""
    return hash_step(hash_prefix(seed, a, b), c)


@njit(cache=True, nogil=True)
def spray_offset(prefix, sample, y, x, radius, height, width):
    """
    One spray sample around (y, x) from a (seed, pixel, spray) hash prefix:
    distance radius * u with u in (0, 1], uniform angle, rounded half-up to the
    pixel grid and clamped to the image.
    """
    h = hash_step(prefix, sample)
    u = (np.float64(h >> _SH32) + 1.0) * _INV_2_32
    theta = np.float64(h & _MASK32) * _INV_2_32 * _TWO_PI
    r = radius * u
    yy = int(math.floor(y + r * math.sin(theta) + 0.5))
    xx = int(math.floor(x + r * math.cos(theta) + 0.5))
    yy = min(max(yy, 0), height - 1)
    xx = min(max(xx, 0), width - 1)
    return yy, xx


@njit(cache=True, nogil=True)
def spray_point(seed, pixel, spray, sample, y, x, radius, height, width):
    """spray_offset with the prefix hashed from scratch."""
    return spray_offset(hash_prefix(seed, pixel, spray), sample, y, x, radius, height, width)


@njit(cache=True, nogil=True)
def scale_ratio(r, log_scale, log_norm):
    if r > 1.0:
        return 1.0
    if log_scale:
        v = 1.0 + math.log(r) / log_norm
        return v if v > 0.0 else 0.0
    return r


@njit(parallel=True, cache=True, nogil=True)
def spray_lightness_kernel(img, samples, sprays, radius, seed):
    """Mean over sprays of I(x) / max(I(x), spray samples), per channel."""
    channels, height, width = img.shape
    out = np.empty_like(img)
    for y in prange(height):
        maxes = np.empty(channels)
        acc = np.empty(channels)
        for x in range(width):
            pixel_state = hash_step(np.uint64(seed), y * width + x)
            for c in range(channels):
                acc[c] = 0.0
            for j in range(sprays):
                prefix = hash_step(pixel_state, j)
                for c in range(channels):
                    maxes[c] = img[c, y, x]
                for k in range(samples):
                    yy, xx = spray_offset(prefix, k, y, x, radius, height, width)
                    for c in range(channels):
                        v = img[c, yy, xx]
                        if v > maxes[c]:
                            maxes[c] = v
                for c in range(channels):
                    acc[c] += img[c, y, x] / maxes[c]
            for c in range(channels):
                out[c, y, x] = acc[c] / sprays
    return out


@njit(cache=True, nogil=True)
def walk_maxima(img, y, x, path, length, seed, maxes):
    """
    Fill maxes with the per-channel maximum along one random 4-neighbour walk
    of the given length starting at (y, x), the start included.

    Moves that would leave the image keep the walker in place. Two hash bits
    per step, a fresh hash every 32 steps.
    """
    channels, height, width = img.shape
    cy = np.int64(y)
    cx = np.int64(x)
    pixel = cy * width + cx
    for c in range(channels):
        maxes[c] = img[c, cy, cx]
    bits = np.uint64(0)
    left = 0
    block = 0
    for _ in range(length):
        if left == 0:
            bits = counter_hash(seed, pixel, path, block)
            block += 1
            left = 32
        d = int(bits & _MASK2)
        bits = bits >> _SH2
        left -= 1
        if d == 0:
            if cy > 0:
                cy -= 1
        elif d == 1:
            if cy < height - 1:
                cy += 1
        elif d == 2:
            if cx > 0:
                cx -= 1
        else:
            if cx < width - 1:
                cx += 1
        for c in range(channels):
            v = img[c, cy, cx]
            if v > maxes[c]:
                maxes[c] = v


@njit(parallel=True, cache=True, nogil=True)
def path_lightness_kernel(img, num_paths, length, seed, log_scale, log_norm):
    """
    Mean over random walks of f(I(x) / max along the walk).

    Walks start at x, which reads the same as a walk ending at x taken backwards.
    """
    channels, height, width = img.shape
    out = np.empty_like(img)
    for y in prange(height):
        maxes = np.empty(channels)
        acc = np.empty(channels)
        for x in range(width):
            for c in range(channels):
                acc[c] = 0.0
            for k in range(num_paths):
                walk_maxima(img, y, x, k, length, seed, maxes)
                for c in range(channels):
                    acc[c] += scale_ratio(img[c, y, x] / maxes[c], log_scale, log_norm)
            for c in range(channels):
                out[c, y, x] = acc[c] / num_paths
    return out



@njit(parallel=True, cache=True, nogil=True)
def kernel_lightness_kernel(img, weights, log_scale, log_norm):
    """
    Kernel-based Retinex: sum of w(x, y) f(I(x)/I(y)) over brighter-or-equal y plus
    the weight of darker y, weights renormalised over the window clipped to the image.
    """
    channels, height, width = img.shape
    half = weights.shape[0] // 2
    out = np.empty_like(img)
    for y in prange(height):
        y0 = max(0, y - half)
        y1 = min(height, y + half + 1)
        for x in range(width):
            x0 = max(0, x - half)
            x1 = min(width, x + half + 1)
            wsum = 0.0
            for yy in range(y0, y1):
                for xx in range(x0, x1):
                    wsum += weights[yy - y + half, xx - x + half]
            for c in range(channels):
                v = img[c, y, x]
                acc = 0.0
                for yy in range(y0, y1):
                    for xx in range(x0, x1):
                        w = weights[yy - y + half, xx - x + half]
                        u = img[c, yy, xx]
                        if u >= v:
                            acc += w * scale_ratio(v / u, log_scale, log_norm)
                        else:
                            acc += w
                out[c, y, x] = acc / wsum
    return out
