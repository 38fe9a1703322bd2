"""
Two classical servers become one quantum server
===============================================

The XOR scheme, its one-server quantum reduction on both paths, the privacy
audit of the server's reduced state, and the random access code it implies.
"""

from qldc import bounds, codes, pir

n = 4
scheme = pir.xor2_scheme(n)
x = (1, 0, 1, 0)
print(pir.transcript_csv(scheme, x, 1))
print("classical privacy:", pir.classical_privacy_audit(scheme).distance)

for path in (pir.GENERIC, pir.XOR):
    q = pir.reduce_2server_to_1quantum(scheme, path)
    rec = {pir.evaluate_quantum_pir(q, x, i) for i in range(n)}
    print(f"{path:8s} recovery {sorted(map(str, rec))}  privacy {pir.quantum_privacy_audit(q).distance:.1e}")

# a scheme that sends the index in the clear is caught at once
print("leaky scheme privacy distance:", pir.classical_privacy_audit(pir.leaky_scheme(n)).distance)

#%%
# Four classical servers over a 2 x 2 cube pair up into two quantum servers
cube = pir.cube_scheme(4, 2)
q = pir.reduce_2k_to_k_quantum(cube)
print("quantum servers:", q.servers, "recovery:", sorted({str(pir.evaluate_quantum_pir(q, y, 0)) for y in codes.all_messages(4)}))

#%%
# Random access code from the XOR scheme, and the communication bound it gives
small = pir.xor2_scheme(3)
res = pir.pir_to_rac(small, pir.XOR)
print("max |state recovery - protocol recovery|:", res.max_recovery_gap)
print("ledger ok:", res.ledger.ok)
print(bounds.check_instance("pir2_xor", {"n": 3, "t": small.t, "eps": small.eps}).to_json())
