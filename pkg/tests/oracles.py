"""Independent reference implementations used to freeze expected values.

These stay deliberately naive (full-matrix DP, direct walks) and separate
from the library code paths they check.
"""


def dp_edit_distance(a, b):
    """Full-matrix Wagner-Fischer edit distance over strings or sequences."""
    rows, cols = len(a) + 1, len(b) + 1
    table = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        table[i][0] = i
    for j in range(cols):
        table[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            table[i][j] = min(
                table[i - 1][j] + 1,
                table[i][j - 1] + 1,
                table[i - 1][j - 1] + cost,
            )
    return table[-1][-1]


def dp_similarity(a, b):
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - dp_edit_distance(a, b) / longest


def prefix_len(a, b):
    count = 0
    for x, y in zip(a, b):
        if x != y:
            break
        count += 1
    return count


def prefix_similarity(a, b):
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return prefix_len(a, b) / longest
