import numpy as np

from gl3lab.error_term import MEAN_SQUARE_SCALE, main_term_residuals, mean_square_profile, series_constant
from gl3lab.pipelines.base import Pipeline

meansquare = Pipeline('meansquare', __name__, needs=('table', 'series'))


@meansquare.runner
def run(context, writer):
    """Integral of Delta^2 against (1/(10 pi^2)) C x^(5/3)."""
    series = context.series
    N = series.length
    xs = context.config.meansquare_points or [x for x in (N / 100, N / 10, N) if x >= 1]
    xs = sorted(float(x) for x in xs)
    results = mean_square_profile(series, xs)
    writer.csv('meansquare.csv', ['x', 'integral', 'predicted', 'ratio'],
               [(r.x, r.integral, r.predicted, r.ratio) for r in results])

    constant = series_constant(context.table, N)
    recorded = {
        'series_constant': constant.to_dict(),
        'ratios': {repr(r.x): r.ratio for r in results},
        'label': 'analogue' if series.has_pole else 'mean_square',
    }
    if series.has_pole:
        recorded['main_term_residuals'] = main_term_residuals(series, np.asarray(xs)).tolist()
    writer.json('meansquare.json', recorded, asserted={'scale': MEAN_SQUARE_SCALE, 'exponent': 5.0 / 3.0})
    return results
