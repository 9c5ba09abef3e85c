#!/usr/bin/env python3
"""Independent reference implementation of the 22-feature catalogue.

Generates the frozen values asserted in test_features.cpp ("catalogue values
are frozen on two fixed signals"). Definitions mirror the documentation in
include/repkit/features.hpp; this file exists so the golden numbers come from
a second, independent implementation rather than from the library itself.

Run:  python3 tests/golden/auto_features_golden.py
"""

import cmath
import math

VAR_FLOOR = 1e-24


def moments(x):
    n = len(x)
    mean = sum(x) / n
    m2 = sum((v - mean) ** 2 for v in x) / n
    m3 = sum((v - mean) ** 3 for v in x) / n
    m4 = sum((v - mean) ** 4 for v in x) / n
    std = math.sqrt(m2)
    return mean, m2, std, m3, m4


def quantile(sorted_x, q):
    n = len(sorted_x)
    pos = q * (n - 1)
    lo = int(pos)
    if lo >= n - 1:
        return sorted_x[-1]
    frac = pos - lo
    return sorted_x[lo] + frac * (sorted_x[lo + 1] - sorted_x[lo])


def acf(x, lag, mean, var):
    n = len(x)
    if lag >= n or var < VAR_FLOOR:
        return 0.0
    num = sum((x[t] - mean) * (x[t + lag] - mean) for t in range(n - lag))
    return num / (var * n)


def power_spectrum(x):
    n = len(x)
    return [abs(sum(x[t] * cmath.exp(-2j * math.pi * k * t / n) for t in range(n))) ** 2
            for k in range(n // 2 + 1)]


def histogram_mode(x, bins):
    mn, mx = min(x), max(x)
    if mx - mn <= 0.0:
        return x[0]
    width = (mx - mn) / bins
    counts = [0] * bins
    for v in x:
        b = min(int((v - mn) / width), bins - 1)
        counts[b] += 1
    best = counts.index(max(counts))
    return mn + (best + 0.5) * width


def auto_features(x):
    n = len(x)
    mean, var, std, _, _ = moments(x)
    sx = sorted(x)
    q10, q25, q50, q75, q90 = (quantile(sx, q) for q in (0.10, 0.25, 0.50, 0.75, 0.90))
    mn, mx = sx[0], sx[-1]
    half = n // 2

    acf1 = acf(x, 1, mean, var)
    acf2 = acf(x, 2, mean, var)
    first_zero = first_1e = 0.5
    found_zero = found_1e = False
    for lag in range(1, half + 1):
        a = acf(x, lag, mean, var)
        if not found_zero and a <= 0.0:
            first_zero, found_zero = lag / n, True
        if not found_1e and a < 1.0 / math.e:
            first_1e, found_1e = lag / n, True
        if found_zero and found_1e:
            break

    above = sum(1 for v in x if v > mean)
    run = best_run = 0
    for v in x:
        run = run + 1 if v > mean else 0
        best_run = max(best_run, run)

    diffs = [x[t + 1] - x[t] for t in range(n - 1)]
    abs_change = sum(abs(d) for d in diffs) / (n - 1)
    change2 = sum(d * d for d in diffs) / (n - 1)
    change3 = sum(d ** 3 for d in diffs) / (n - 1)
    trev = 0.0 if change2 < VAR_FLOOR else change3 / change2 ** 1.5

    quantile_skew = ((q90 - q50) - (q50 - q10)) / (q90 - q10) if q90 - q10 > 0 else 0.0
    iqr_range = (q75 - q25) / (mx - mn) if mx - mn > 0 else 0.0

    centroid = rolloff = flatness = 0.0
    if var >= VAR_FLOOR and half >= 1:
        power = power_spectrum(x)
        total = sum(power[1:half + 1])
        if total > 0.0:
            cum = 0.0
            roll_k = half
            rolled = False
            log_sum = 0.0
            for k in range(1, half + 1):
                p = power[k] / total
                centroid += (k / half) * p
                cum += p
                if not rolled and cum >= 0.85:
                    roll_k, rolled = k, True
                log_sum += math.log(max(power[k], 1e-300))
            rolloff = roll_k / half
            flatness = math.exp(log_sum / half) / (total / half)

    forecast = 0.0
    if std >= 1e-12 and n > 3:
        se = sum((x[t] - (x[t - 1] + x[t - 2] + x[t - 3]) / 3.0) ** 2 for t in range(3, n))
        forecast = math.sqrt(se / (n - 3)) / std

    counts2 = [0] * 4
    for t in range(n - 2):
        a_sym = 1 if x[t + 1] - x[t] > 0 else 0
        b_sym = 1 if x[t + 2] - x[t + 1] > 0 else 0
        counts2[2 * a_sym + b_sym] += 1
    motif2 = max(counts2) / (n - 2)

    counts3 = [0] * 8
    for t in range(n - 2):
        word = 4 * (1 if x[t] > q50 else 0) + 2 * (1 if x[t + 1] > q50 else 0) + (
            1 if x[t + 2] > q50 else 0)
        counts3[word] += 1
    motif3 = max(counts3) / (n - 2)

    time_pos = time_neg = 0.5
    if std >= 1e-12:
        pos = [t / (n - 1) for t in range(n) if x[t] > mean + std]
        neg = [t / (n - 1) for t in range(n) if x[t] < mean - std]
        if pos:
            time_pos = sum(pos) / len(pos)
        if neg:
            time_neg = sum(neg) / len(neg)

    crossings = sum(1 for t in range(n - 1) if (x[t] - mean) * (x[t + 1] - mean) < 0)
    extrema = sum(1 for t in range(1, n - 1) if (x[t] - x[t - 1]) * (x[t + 1] - x[t]) < 0)

    return [
        histogram_mode(x, 5), histogram_mode(x, 10), acf1, acf2, first_zero, first_1e,
        above / n, best_run / n, abs_change, trev, quantile_skew, iqr_range,
        centroid, rolloff, flatness, forecast, motif2, motif3, time_pos, time_neg,
        crossings / (n - 1), extrema / (n - 2),
    ]


def main():
    a = [math.sin(2 * math.pi * 3 * t / 64) + 0.01 * t for t in range(64)]
    b = [math.cos(2 * math.pi * 5 * (t / 96) + 0.7) * (1 + 0.3 * math.sin(2 * math.pi * 0.5 * (t / 96)))
         + 0.2 * (t / 96) ** 2 for t in range(96)]
    for name, sig in (("A", a), ("B", b)):
        values = ", ".join(f"{v:.15g}" for v in auto_features(sig))
        print(f"golden_{name} = {{{values}}}")


if __name__ == "__main__":
    main()
