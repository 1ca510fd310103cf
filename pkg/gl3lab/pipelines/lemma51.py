from gl3lab.pipelines.base import Pipeline
from gl3lab.voronoi import lemma51_profile

lemma51 = Pipeline('lemma51', __name__, needs=('table',))


@lemma51.runner
def run(context, writer):
    """Mean zero, sup-norm decay and square integrability of the kernel blocks."""
    profile = lemma51_profile(context.table, n_max=min(200, context.table.length))
    writer.csv('lemma51.csv', ['kernel', 'mean', 'sup'],
               zip(profile['kernels'], profile['means'], profile['sups']))
    recorded = {k: v for k, v in profile.items() if k not in ('kernels', 'means', 'sups')}
    writer.json('lemma51.json', recorded, asserted={
        'mean': 0.0,
        'sup_decay_exponent': -0.4,
        'square_increment_threshold': 1e-3,
    })
    return profile
