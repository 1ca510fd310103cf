import numpy as np

from gl3lab.error_term import delta_at
from gl3lab.models import VoronoiConfig
from gl3lab.pipelines.base import Pipeline
from gl3lab.voronoi import grid_comparison, truncated_voronoi_many, truncation_defect

voronoi = Pipeline('voronoi', __name__, needs=('table', 'series'))

ERROR_EXPONENT = 0.45


@voronoi.runner
def run(context, writer):
    """Truncated Voronoi sums against exact Delta(x) at half-integers near x."""
    cfg = context.config
    series = context.series
    table = context.table
    count = cfg.voronoi_sample_count
    x0 = cfg.voronoi_x or min(1e5, table.length / 2)
    start = np.floor(min(x0, table.length - count - 1)) + 0.5
    xs = start + np.arange(count, dtype=np.float64)
    exact = delta_at(series, xs)

    rows = []
    summary = []
    for alpha in cfg.voronoi_alphas:
        vcfg = VoronoiConfig(alpha=alpha, sample_count=count, argument_precision=cfg.voronoi_precision)
        approx = truncated_voronoi_many(table, xs, vcfg)
        errors = np.abs(exact - approx)
        rows.extend(zip(xs, [alpha] * count, exact, approx, errors))
        summary.append({
            'alpha': alpha,
            'median_error': float(np.median(errors)),
            'max_error': float(errors.max()),
            'fitted_C': float(np.max(errors / xs ** ERROR_EXPONENT)),
        })
    writer.csv('voronoi_errors.csv', ['x', 'alpha', 'delta', 'truncation', 'abs_error'], rows)

    medians = [row['median_error'] for row in sorted(summary, key=lambda row: row['alpha'])]
    recorded = {
        'x0': float(start),
        'alphas': summary,
        'median_decreases_with_alpha': all(a > b for a, b in zip(medians, medians[1:])),
    }
    T = cfg.window.T[0]
    if 2 * T <= series.length and cfg.N_trunc ** 4 <= table.length:
        recorded['truncation_defect'] = truncation_defect(
            series, table, T, cfg.N_trunc, count=min(cfg.window.count, 1000), cfg=cfg.voronoi)
        t = T * (1.0 + (np.arange(1, 201) - 0.5) / 200)
        writer.csv('voronoi_grid.csv', ['t', 'F_exact', 'F_voronoi', 'F_N'],
                   grid_comparison(series, table, t, cfg.N_trunc, cfg.voronoi))
    writer.json('voronoi.json', recorded, asserted={'error_shape': 'O(x^(1 - alpha + eps))'})
    return summary
