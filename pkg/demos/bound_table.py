"""
Lower bounds at a glance
========================
"""

from qldc import bounds, cli

grid = {"formulas": ["ldc2", "ldc2_xor", "lqdc1", "pir2", "pir2_xor"], "eps": ["1/8", "1/4", "1/2"], "delta": ["1/4"], "n": [64]}
print(cli.emit_bound_table(grid))

# the constant-free form cannot be checked against an instance
print(bounds.check_instance("pir2_large_answers", {"n": 64, "t": 10, "eps": 0.25}).note)
