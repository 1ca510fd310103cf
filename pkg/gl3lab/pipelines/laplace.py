from gl3lab.pipelines.base import Pipeline
from gl3lab.random_model import (
    LAPLACE_LOWER_EXPONENT,
    LAPLACE_TAIL_EXPONENT,
    LAPLACE_UPPER_EXPONENT,
    laplace_growth_exponent,
    laplace_transform,
    laplace_transform_exact,
)

laplace = Pipeline('laplace', __name__, needs=('table', 'model'))

_ASSERTED_KEYS = ('upper_exponent_printed', 'upper_exponent_from_tail_argument')


@laplace.runner
def run(context, writer):
    """Growth of log E exp(lambda F) in lambda, exact product against Monte Carlo."""
    model = context.model
    lambdas = context.config.tails.lambdas
    batch = context.batch()

    rows = []
    for lam in lambdas:
        estimate, stderr = laplace_transform(model, lam, batch.seed, batch.count, batch=batch)
        rows.append((lam, laplace_transform_exact(model, lam), estimate, stderr))
    writer.csv('laplace.csv', ['lambda', 'exact', 'monte_carlo', 'stderr'], rows)

    growth = laplace_growth_exponent(model, [lam for lam in lambdas if lam > 0])
    recorded = {k: v for k, v in growth.items() if k not in _ASSERTED_KEYS}
    writer.json('laplace.json', recorded, asserted={
        'lower_exponent': LAPLACE_LOWER_EXPONENT,
        'upper_exponent_printed': LAPLACE_UPPER_EXPONENT,
        'upper_exponent_from_tail_argument': LAPLACE_TAIL_EXPONENT,
    })
    return growth
