import numpy as np

from gl3lab.empirics import (
    berry_esseen_bound,
    cdf_table,
    density_estimate,
    discrepancy_rate,
    empirical_characteristic_function,
    ks_distance,
    silverman_bandwidth,
)
from gl3lab.models import EmpiricalDistribution
from gl3lab.pipelines.base import Pipeline
from gl3lab.random_model import model_characteristic_function

discrepancy = Pipeline('discrepancy', __name__, needs=('table', 'series', 'model'))


@discrepancy.runner
def run(context, writer):
    """KS distance between window distributions of F and the model, per T."""
    cfg = context.config
    model_dist = EmpiricalDistribution(samples=context.batch().values)
    phi_model = model_characteristic_function(context.model)

    rows = []
    for T in cfg.window.T:
        dist = context.window_distribution(T)
        D = ks_distance(dist, model_dist)
        bound = berry_esseen_bound(empirical_characteristic_function(dist), phi_model,
                                   cfg.berry_esseen_R, cfg.berry_esseen_points)
        rows.append((T, D, bound, discrepancy_rate(T), dist.mean(), dist.std()))
        context.logger.info(f'Discrepancy at T={T:g}: D={D:.4f}, Berry-Esseen bound {bound:.4f}')

        lo = min(dist.quantile(0.001), model_dist.quantile(0.001))
        hi = max(dist.quantile(0.999), model_dist.quantile(0.999))
        points = np.linspace(lo, hi, 201)
        writer.csv(f'cdf_T{int(T)}.csv', ['u', 'cdf_window', 'cdf_model'], cdf_table(dist, model_dist, points))
        grid = np.linspace(lo - 1.0, hi + 1.0, 401)
        writer.csv(f'density_T{int(T)}.csv', ['alpha', 'density'],
                   density_estimate(dist, silverman_bandwidth(dist), grid))

    writer.csv('discrepancy.csv', ['T', 'ks', 'berry_esseen_bound', 'rate', 'mean', 'std'], rows)
    writer.json('discrepancy.json', {
        'rows': [dict(zip(('T', 'ks', 'berry_esseen_bound', 'rate', 'mean', 'std'), row)) for row in rows],
        'nonincreasing': bool(rows[-1][1] <= rows[0][1]),
        'bound_dominates': bool(all(row[2] >= row[1] for row in rows)),
        'model_draws': model_dist.size,
    }, asserted={'rate': '(log log log T)^(5/3) / (log log T)^(1/3)'})
    return rows
