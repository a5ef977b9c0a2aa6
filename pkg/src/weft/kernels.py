"""Edit-distance kernel selection.

The similarity math underpins key matching, path linking and synset
grouping, so the inner loops are compiled (Cython) when the extension
built. Set WEFT_PURE_PYTHON=1 to force the fallback, e.g. for the
benchmark in benchmarks/bench_kernels.py.
"""

import os

if os.environ.get("WEFT_PURE_PYTHON"):
    from weft import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from weft import _speedups as _impl  # type: ignore[no-redef]

        BACKEND = "c"
    except ImportError:
        from weft import _kernels_py as _impl  # type: ignore[no-redef]

        BACKEND = "python"

levenshtein = _impl.levenshtein
levenshtein_seq = _impl.levenshtein_seq
common_prefix_len = _impl.common_prefix_len
