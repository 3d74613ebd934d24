"""How the (7, 4) code spends its 17 ternary digits."""

from coopmsr.pairmap import build

pm = build(7, 3)
print(f"n=7, r=3: g={pm.g} groups, m={pm.m} digits, ell=3^{pm.m}")

# groups {1,2,3} and {4,5,6} each share one digit; node 7 is a tail node
for name, rows in pm.table().items():
    cells = "  ".join(f"pi({j},{jp})={v}" for j, jp, v in rows)
    print(f"{name}: {cells}")

# every cross-group digit is a 0-role for the smaller node and a 1-role for the larger
for j in range(1, 8):
    om0, om1 = pm.omega(j)
    print(f"node {j}: Omega0={sorted(om0)}  Omega1={sorted(om1)}")

print(pm.classify(4, 5), pm.classify(2, 7))
