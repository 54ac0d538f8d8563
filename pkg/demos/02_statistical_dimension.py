"""How big is the l1 descent cone at a k-sparse point?

The squared Gaussian width omega^2 is the number of measurements the
C-LASSO needs.  A closed form (minimised over the threshold tau) and a
Monte Carlo estimate are compared, along with the cruder 2k log(n/k) bound.

The Monte Carlo value sits a little below the closed form: it averages
the minimum over lambda, while the closed form minimises the average.

Run:  python demos/02_statistical_dimension.py
"""
from irolasso import (
    RandomSource,
    estimate_width_mc,
    random_sparse_signal,
    width_closed_form_sparse,
    width_log_bound,
)

src = RandomSource(11)
print(f"{'n':>5} {'k':>4} {'closed form':>12} {'MC':>9} {'MC s.e.':>8} {'log bound':>10}")
for n, k in ((64, 4), (128, 8), (256, 10), (512, 20)):
    cf = width_closed_form_sparse(n, k).omega_sq
    mc = estimate_width_mc(random_sparse_signal(n, k, src.child(n)), 4000, src.child("mc", n))
    lb = width_log_bound(n, k).omega_sq
    print(f"{n:>5} {k:>4} {cf:>12.3f} {mc.omega_sq:>9.3f} {mc.std_err:>8.3f} {lb:>10.2f}")
