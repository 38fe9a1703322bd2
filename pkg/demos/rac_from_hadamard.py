"""
A random access code hidden inside a one-query decoder
======================================================

The uniform superposition |U(x)> over the codeword, on log(2m) qubits, lets
each bit x_i be guessed with probability above 1/2.  The entropy chain then
caps how many bits a state of that size can carry.
"""

from fractions import Fraction

from qldc import bounds, cdec, codes, qdec, rac

n = 4
delta = Fraction(1, 8)
code = codes.hadamard_code(n)
qd = qdec.compile_xor_ldc_to_lqdc(cdec.hadamard_two_query_decoder(n))

# exhaustive check over all corruptions of at most delta m positions
eps = cdec.certify_epsilon(code, lambda y, x, i: qdec.evaluate_lqdc(qd, y, x, i), delta)
print("certified eps:", eps)

p_worst = []
for mode in (rac.STANDARD, rac.IMPROVED):
    for i in range(n):
        res = rac.rac_recover_bit(code, qd, i, delta, mode, eps)
        print(f"{mode:9s} i={i}  a^2={res.split.a_sq}  worst {res.worst:.6f}  bound {res.bound:.6f}")
        if mode == rac.IMPROVED:
            p_worst.append(res.worst)

#%%
# Entropy ledger on the 2^n encoded states
states = [rac.build_uniform_state(code, x).state for x in codes.all_messages(n)]
ledger = rac.nayak_audit(states, p_worst)
for q in ledger.inequalities:
    print(f"{'ok ' if q.holds else 'BAD'} {q.name:40s} {q.lhs:9.5f} {q.relation} {q.rhs:9.5f}")

print("implied length bound at n=1000:", bounds.bound_value("lqdc1", {"n": 1000, "delta": delta, "eps": eps}))
