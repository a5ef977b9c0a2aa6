"""Pure-Python edit-distance kernels, used when the compiled module is absent."""


def levenshtein(a, b):
    """Edit distance between two strings (insert/delete/substitute, unit cost)."""
    return _levenshtein(a, b)


def levenshtein_seq(a, b):
    """Edit distance between two token sequences, tokens compared by equality."""
    return _levenshtein(a, b)


def _levenshtein(a, b):
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        cur = [i] + [0] * lb
        ai = a[i - 1]
        for j in range(1, lb + 1):
            cost = 0 if ai == b[j - 1] else 1
            cur[j] = min(cur[j - 1] + 1, prev[j] + 1, prev[j - 1] + cost)
        prev = cur
    return prev[lb]


def common_prefix_len(a, b):
    """Number of equal leading tokens of two sequences."""
    n = min(len(a), len(b))
    for i in range(n):
        if a[i] != b[i]:
            return i
    return n
