"""Noise sensitivity of the constrained LASSO: formula against simulation.

For small noise the normalised squared error ||x_hat - x0||^2 / sigma^2
settles near a closed form depending only on n, m and omega^2:

    i.r.o.    omega^2 (n - omega^2) / (m - omega^2)
    Gaussian  n omega^2 / (m - omega^2)

The i.r.o. value is smaller by the factor (n - omega^2)/n, and the
partial DCT and Hadamard ensembles behave like i.r.o.

Run:  python demos/03_nse_formula_vs_simulation.py   (about 10 s)
"""
from irolasso.harness import ExperimentSpec, group_stats, run_nse_sweep

spec = ExperimentSpec(master_seed=5, ensembles=("iro", "gaussian", "pdct", "phadamard"),
                      n=256, k=10, m_list=(80, 128, 192), sigma_list=(1e-3,), trials=15, workers=2)
rows = run_nse_sweep(spec)
pred = {(r.ensemble, r.m): r.nse_predicted for r in rows}

print(f"omega^2 = {rows[0].omega_sq_used:.3f}\n")
print(f"{'ensemble':<10} {'m':>4} {'empirical':>10} {'formula':>10} {'ratio':>6}")
for g in group_stats(rows):
    p = pred[(g.ensemble, g.m)]
    print(f"{g.ensemble:<10} {g.m:>4} {g.mean:>10.2f} {p:>10.2f} {g.mean / p:>6.2f}")

# The ratio drifts away from one as sigma grows: the formula is a small-noise limit.
prof = run_nse_sweep(ExperimentSpec(master_seed=5, ensembles=("iro",), n=256, k=10, m_list=(128,),
                                    sigma_list=(1e-4, 1e-2, 1e-1, 1.0), trials=10))
print("\ni.r.o., m=128, mean NSE per sigma:")
for s in (1e-4, 1e-2, 1e-1, 1.0):
    vals = [r.nse_empirical for r in prof if r.sigma == s]
    print(f"  sigma={s:<7g} {sum(vals) / len(vals):8.2f}")
