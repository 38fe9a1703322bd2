"""
One quantum query versus two classical queries
===============================================

A single quantum query to a pair of bits recovers any boolean function of the
pair with probability 11/14, and recovers their XOR with certainty.
"""

from fractions import Fraction
from itertools import product

import numpy as np

from qldc import cdec, codes, qdec

# The query state and the four measurement outcomes, for input bits a = (1, 0)
trace = qdec.gadget_trace(cdec.AND, (1, 0))
print("query:", trace["query_state"], "after the oracle:", trace["post_oracle_state"])
print("outcome distribution:", trace["outcome_probabilities"])

# Every one of the 16 functions, on every input: always 11/14
worst = min(qdec.run_gadget(f, a)[f[2 * a[0] + a[1]]] for f in product((0, 1), repeat=4) for a in product((0, 1), repeat=2))
print("worst success over all f, a:", worst)

# The XOR variant needs no post-processing at all
for a in product((0, 1), repeat=2):
    print(a, "->", [str(p) for p in qdec.xor_gadget_distribution(*a)])

#%%
# Compile the Hadamard decoder into a one-query quantum decoder and corrupt a codeword
n = 4
code = codes.hadamard_code(n)
dec = cdec.hadamard_two_query_decoder(n)
qd = qdec.compile_2ldc_to_1lqdc(dec)

rng = np.random.default_rng(0)
x = tuple(int(b) for b in rng.integers(0, 2, n))
y = codes.corrupt(code(x), codes.CorruptionSpec(Fraction(1, 8), seed=1))
for i in range(n):
    c = cdec.evaluate_two_query(dec, y, x, i)
    q = qdec.evaluate_lqdc(qd, y, x, i)
    print(f"i={i}  classical {c}  quantum {q}  3/14 + 4c/7 = {Fraction(3, 14) + Fraction(4, 7) * c}")
