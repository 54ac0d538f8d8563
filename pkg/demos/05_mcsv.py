"""Minimum conic singular value: lower bounds versus what a search finds.

The smallest value of ||A w|| over unit vectors w in the l1 descent cone
controls robust recovery.  Closed-form lower bounds exist for the i.r.o.
and Gaussian ensembles.  The empirical value is found by projected
descent over the cone with random restarts, so it is an upper bound on
the true minimum.  The lower bounds are asymptotic: for a single draw
at moderate n the search can land below the i.r.o. bound, most often
when m is far from n.

Run:  python demos/05_mcsv.py   (about 20 s)
"""
from irolasso import RandomSource, gen_iro, mcsv_gap_report, random_sparse_signal
from irolasso.predictions import mcsv_limit_study

src = RandomSource(3)
n, k = 128, 4
print(f"{'m':>4} {'status':<12} {'search':>8} {'iro bound':>10} {'gauss bound':>12}")
for m in (64, 96, 112, 128):
    a = gen_iro(m, n, src.child("a", m))
    sig = random_sparse_signal(n, k, src.child("x", m))
    r = mcsv_gap_report(a, sig, restarts=6, iters=600, src=src.child("s", m))
    print(f"{m:>4} {r.status:<12} {r.empirical:>8.4f} {r.iro_bound:>10.4f} {r.gaussian_bound:>12.4f}")

print("\nbound as m approaches n (omega = 6):")
for row in mcsv_limit_study(n, 6.0):
    print(f"  m={row['m']:>4}  printed={row['printed']:.4f}  alternate={row['alternate']:.4f}  "
          f"gaussian={row['gaussian']:.4f}")
