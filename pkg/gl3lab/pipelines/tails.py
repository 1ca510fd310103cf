import math

import numpy as np

from gl3lab.empirics import bound_curves, tail_probability, wilson_interval
from gl3lab.models import EmpiricalDistribution
from gl3lab.pipelines.base import Pipeline
from gl3lab.random_model import chernoff_tail_bound, exact_second_moment

tails = Pipeline('tails', __name__, needs=('table', 'model'))


def _log_convex_decreasing(values):
    logs = np.log(np.asarray(values, dtype=np.float64))
    if not np.all(np.isfinite(logs)):
        return False
    decreasing = bool(np.all(np.diff(logs) < 0))
    return decreasing and bool(np.all(np.diff(logs, 2) <= 1e-12)) if logs.size > 2 else decreasing


@tails.runner
def run(context, writer):
    """Model tail probabilities at multiples of the standard deviation."""
    cfg = context.config.tails
    model = context.model
    dist = EmpiricalDistribution(samples=context.batch().values)
    sigma = math.sqrt(exact_second_moment(model))
    V = np.asarray(cfg.multiples, dtype=np.float64) * sigma
    curves = bound_curves(max(context.config.window.T), V, cfg.eps1, cfg.eps2, cfg.constants or None)

    rows = []
    upper = []
    for v, low_env, up_env in zip(V, curves.lower, curves.upper):
        for side in ('above', 'below'):
            p = tail_probability(dist, v, side)
            lo, hi = wilson_interval(round(p * dist.size), dist.size)
            if side == 'above':
                chernoff, _ = chernoff_tail_bound(model, v, cfg.lambdas)
            else:
                chernoff, _ = chernoff_tail_bound(model, -v, [-lam for lam in cfg.lambdas])
            rows.append((v, side, p, lo, hi, chernoff, low_env, up_env))
            if side == 'above':
                upper.append(p)

    writer.csv('tails.csv', ['V', 'side', 'probability', 'wilson_low', 'wilson_high', 'chernoff',
                             'envelope_lower', 'envelope_upper'], rows)
    inside = [bool(lo_env <= p <= up_env) for p, lo_env, up_env in zip(upper, curves.lower, curves.upper)]
    writer.json('tails.json', {
        'sigma': sigma,
        'log_convex_decreasing': _log_convex_decreasing(upper),
        'inside_envelope': inside,
        'curves': curves.to_dict(),
    }, asserted={
        'lower_exponent': '35/2 + eps1',
        'upper_exponent': '5/3 - eps2',
        'constants_are_configured': True,
    })
    return rows
