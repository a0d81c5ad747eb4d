"""Sweep gradient cost over model width and fit the scaling trends.

The per-parameter engine pays one forward pass per parameter, so its
total cost is quadratic in P while its per-parameter cost is linear;
the single-pass engines stay linear in total.
"""

from dualgrad.bench import DEFAULT_WIDTHS, format_table, linear_fit_r2, run_bench

results = run_bench(widths=DEFAULT_WIDTHS, reps=30, seed=0)
print(format_table(results))
print()

for engine in ("ones", "seeded", "backprop"):
    rows = [r for r in results if r.engine == engine]
    ps = [r.params for r in rows]
    slope_total, _, r2_total = linear_fit_r2(ps, [r.median_ns for r in rows])
    slope_pp, _, r2_pp = linear_fit_r2(ps, [r.ns_per_param for r in rows])
    print(f"{engine:>9}: total ns vs P  slope {slope_total:12.1f}  R^2 {r2_total:.4f}   "
          f"ns/param vs P  slope {slope_pp:8.2f}  R^2 {r2_pp:.4f}")
