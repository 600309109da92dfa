"""Hydrogen with the naive ordering g^ab d_a d_b in spherical coordinates.

Separating variables gives an angular problem without the first-derivative
term of the usual Legendre equation, so its levels are l^2 (m = 0) or
(l + s)^2 with s(s - 1) = m^2. Feeding them into the radial equation shifts
every level except the m = 0 s-states away from the Bohr formula.
"""

from ordlab import QuantumNumbers, eigenfunction_residual, spectrum_table, standard_energy

table = spectrum_table(3, (0, 1, 2))
print(f"{'n':>2}{'l':>3}{'m':>3}{'closed form':>16}{'eigensolver':>16}{'Bohr':>12}")
for r in table.rows:
    print(f"{r.n:>2}{r.l:>3}{r.m:>3}{r.E_closed:>16.10f}{r.E_numeric:>16.10f}{standard_energy(r.n):>12.6f}")
print(f"max |closed - eigensolver| = {table.max_abs_err():.2e}")

for qn in (QuantumNumbers(1, 0), QuantumNumbers(2, 1), QuantumNumbers(2, 1, 1)):
    print(qn, "eigenfunction residual", f"{eigenfunction_residual(qn):.1e}")
