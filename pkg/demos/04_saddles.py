"""The scalar saddle problems behind the closed forms.

Both predictions come from two-variable max-min problems.  Solving them
numerically by nested golden-section search recovers the closed-form
saddle values.  The error reconstructed from the NSE saddle is printed
next to the closed-form NSE: the two agree only when n - m == m - omega^2.

Run:  python demos/04_saddles.py
"""
from irolasso import (
    ProblemDims,
    ao_saddle_numeric,
    mcsv_ao_numeric,
    mcsv_bound_gaussian,
    mcsv_bound_iro,
    nse_iro,
)
from irolasso.predictions import ao_nse_comparison

n = 256
for m, w2 in ((128, 64.0), (160, 64.0), (192, 100.0)):
    s = ao_saddle_numeric(n, m, w2)
    c = ao_nse_comparison(n, m, w2)
    print(f"NSE saddle  m={m} omega^2={w2:g}: t*={s.t:.4f} beta^2*={s.beta_sq:.4f}  "
          f"reconstructed {c.reconstructed:.3f} vs formula {nse_iro(ProblemDims(n, m, w2)):.3f}")

print()
for m, w in ((128, 6.0), (200, 8.0)):
    num = mcsv_ao_numeric(n, m, w).value
    print(f"mCSV saddle m={m} omega={w:g}: numeric {num:.6f}  closed form {mcsv_bound_iro(n, m, w):.6f}  "
          f"Gaussian {mcsv_bound_gaussian(n, m, w):.6f}")
