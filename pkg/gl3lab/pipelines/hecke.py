import math

from gl3lab import current_lab
from gl3lab.coeffs import (
    check_gl2_hecke,
    check_multiplicativity,
    hecke_consistency_check,
    partial_sum_growth,
    rankin_selberg_profile,
)
from gl3lab.models import Provider
from gl3lab.pipelines.base import Pipeline

hecke = Pipeline('hecke', __name__, needs=('table',))


@hecke.runner
def run(context, writer):
    """Hecke relations, multiplicativity and Rankin-Selberg growth of the table."""
    table = context.table
    cfg = context.config
    bound = min(cfg.hecke_bound, table.length)
    report = hecke_consistency_check(table, bound)

    recorded = {
        'hecke': report.to_dict(),
        'rankin_selberg': rankin_selberg_profile(table),
        'partial_sum_growth': partial_sum_growth(table)['constant'],
        'table': table.to_dict(),
    }
    multiplicative_bound = min(10 ** 3, math.isqrt(table.length))
    if table.provider is not Provider.EXTERNAL and multiplicative_bound >= 2:
        recorded['multiplicativity'] = {
            'bound': multiplicative_bound,
            'max_violation': check_multiplicativity(table, multiplicative_bound),
        }
    if context.gl2 is not None:
        gl2_bound = min(context.gl2.length, 2000)
        recorded['gl2_hecke'] = {'bound': gl2_bound, 'max_violation': check_gl2_hecke(context.gl2, gl2_bound)}

    writer.csv('hecke.csv', ['identity', 'max_violation', 'tolerance', 'passed'], [
        (row['identity'], row['max_violation'], row['tolerance'], row['passed'])
        for row in report.to_dict()['identities']
    ])
    writer.json('hecke.json', recorded, asserted={
        'identity': 'A(m1,1)A(1,m2) = sum over d | (m1,m2) of A(m1/d, m2/d)',
        'relative_tolerance': current_lab().config['HECKE_RELATIVE_TOLERANCE'],
    })
    return report.passed
