"""Independent reference implementations used only by the tests."""

import cmath
import math


def brute_force_params(input_width, hidden_widths, output_width):
    """Count every weight and bias one by one."""
    layers = [input_width] + list(hidden_widths) + [output_width]
    total = 0
    for prev, cur in zip(layers, layers[1:]):
        for _ in range(cur):
            total += prev  # incoming weights of this node
            total += 1  # its bias
    return total


def hann(n, length):
    return 0.5 - 0.5 * math.cos(2 * math.pi * n / length)


def rect(n, length):
    return 1.0


def naive_spectrogram(x, window_fn, length, hop):
    """Double loop over the windowed-sum definition with absolute time index.

    The inner sum only visits samples where the window is non-zero.
    """
    frames = 1 + (len(x) - length) // hop
    bins = length // 2 + 1
    out = [[0.0] * frames for _ in range(bins)]
    for f in range(frames):
        start = f * hop
        for k in range(bins):
            acc = 0j
            for n in range(start, start + length):
                acc += x[n] * window_fn(n - start, length) * cmath.exp(-2j * math.pi * k * n / length)
            out[k][f] = abs(acc) ** 2
    return out


def keys_kernel(s, a=-0.5):
    s = abs(s)
    if s <= 1:
        return (a + 2) * s ** 3 - (a + 3) * s ** 2 + 1
    if s < 2:
        return a * s ** 3 - 5 * a * s ** 2 + 8 * a * s - 4 * a
    return 0.0


def direct_bicubic(grid, out_rows, out_cols, a=-0.5):
    """Evaluate each output pixel as a 4x4 kernel-weighted sum of the input."""
    rows, cols = len(grid), len(grid[0])
    out = [[0.0] * out_cols for _ in range(out_rows)]
    for i in range(out_rows):
        y = (i + 0.5) * rows / out_rows - 0.5
        for j in range(out_cols):
            x = (j + 0.5) * cols / out_cols - 0.5
            acc = 0.0
            for p in range(math.floor(y) - 1, math.floor(y) + 3):
                for q in range(math.floor(x) - 1, math.floor(x) + 3):
                    pr = min(max(p, 0), rows - 1)
                    qc = min(max(q, 0), cols - 1)
                    acc += grid[pr][qc] * keys_kernel(y - p, a) * keys_kernel(x - q, a)
            out[i][j] = acc
    return out
