"""Compare the compiled edit-distance kernels against the pure-Python twins.

Times char edit distance and token LCS length over seeded synthetic document
pairs. Run as:

    python3 benchmarks/bench_kernels.py [--pairs N] [--chars N]
"""

import argparse
import random
import time

from ocrkit import kernels
from ocrkit._editpure import edit_distance as pure_edit, lcs_length as pure_lcs

try:
    from ocrkit._editcore import edit_distance as fast_edit, lcs_length as fast_lcs
except ImportError:
    fast_edit = None
    fast_lcs = None

ALPHABET = "abcdefghij áéíóúñ.,;\n"


def make_pairs(n_pairs, n_chars, seed=1234):
    rng = random.Random(seed)
    pairs = []
    for _ in range(n_pairs):
        ref = "".join(rng.choice(ALPHABET) for _ in range(n_chars))
        # Hypothesis: the reference with ~5% random edits, like OCR noise.
        chars = list(ref)
        for _ in range(max(1, n_chars // 20)):
            op = rng.choice("sid")
            pos = rng.randrange(len(chars))
            if op == "s":
                chars[pos] = rng.choice(ALPHABET)
            elif op == "i":
                chars.insert(pos, rng.choice(ALPHABET))
            elif len(chars) > 1:
                del chars[pos]
        pairs.append((ref, "".join(chars)))
    return pairs


def bench(label, func, encoded):
    start = time.perf_counter()
    checksum = 0
    for a, b in encoded:
        checksum += func(a, b)
    elapsed = time.perf_counter() - start
    ms = elapsed / len(encoded) * 1000
    print(f"{label:<28} {ms:8.3f} ms/pair  (checksum {checksum})")
    return elapsed


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--pairs", type=int, default=50)
    parser.add_argument("--chars", type=int, default=2000)
    args = parser.parse_args()

    print(f"active backend: {kernels.BACKEND}")
    pairs = make_pairs(args.pairs, args.chars)
    encoded = [
        (kernels.encode_chars(a), kernels.encode_chars(b)) for a, b in pairs
    ]
    print(f"{args.pairs} pairs of ~{args.chars} chars\n")

    pure_time = bench("edit_distance pure", pure_edit, encoded)
    if fast_edit is not None:
        fast_time = bench("edit_distance compiled", fast_edit, encoded)
        print(f"{'':28} speedup x{pure_time / fast_time:.1f}\n")
    else:
        print(f"{'':28} compiled kernel not built\n")

    # Token-level inputs are much shorter; use word sequences.
    token_pairs = []
    for a, b in pairs:
        token_pairs.append(kernels.encode_token_pair(a.split(), b.split()))
    pure_time = bench("lcs_length pure", pure_lcs, token_pairs)
    if fast_lcs is not None:
        fast_time = bench("lcs_length compiled", fast_lcs, token_pairs)
        print(f"{'':28} speedup x{pure_time / fast_time:.1f}")
    else:
        print(f"{'':28} compiled kernel not built")


if __name__ == "__main__":
    main()
