"""Four ways to draw a measurement matrix, and what makes the i.r.o. one special.

An i.r.o. matrix has exactly orthonormal rows, so A A^T = I.  A Gaussian
matrix scaled to the same convention only has this property on average.
The partial DCT and Hadamard matrices are deterministic orthogonal
transforms with randomly kept rows.

Run:  python demos/01_ensembles.py
"""
import numpy as np

from irolasso import RandomSource, generate

src = RandomSource(7)
m, n = 48, 64

print(f"{'ensemble':<12} {'||AA^T - I||_max':>18} {'sigma_min':>10} {'sigma_max':>10}")
for name in ("iro", "gaussian", "pdct", "phadamard"):
    a = generate(name, m, n, src.child(name)).entries
    gram_err = np.abs(a @ a.T - np.eye(m)).max()
    s = np.linalg.svd(a, compute_uv=False)
    print(f"{name:<12} {gram_err:>18.2e} {s[-1]:>10.4f} {s[0]:>10.4f}")

# The Gaussian and i.r.o. draws come from the same substream: orthonormalising
# the Gaussian matrix reproduces the i.r.o. one.
g = generate("gaussian", m, n, src.child("pair")).entries
q = generate("iro", m, n, src.child("pair")).entries
w, v = np.linalg.eigh(g @ g.T)
print("\ni.r.o. == (GG^T)^{-1/2} G on a shared stream:",
      np.allclose(q, (v / np.sqrt(w)) @ v.T @ g))
