from __future__ import annotations

from lumaca.path_calculus.cadlag import (
    CadlagPath,
    IntegralResult,
    align,
    refine,
    same_grid,
    union_grid,
)
from lumaca.path_calculus.fixtures import brownian_path, indicator_path
from lumaca.path_calculus.integrals import (
    compose,
    compose_increment,
    covariation,
    ito_sum,
    quadratic_variation,
    through_inverse,
)
from lumaca.path_calculus.verifiers import (
    CalculusRules,
    ItoIntegrands,
    Residual,
    calculus_rules,
    jump_correction,
    verify_drift_reclocking,
    verify_first_cov,
    verify_product_rule,
    verify_qv_composition,
    verify_second_cov,
    verify_tc_ito,
)

__all__ = [
    "CadlagPath",
    "CalculusRules",
    "IntegralResult",
    "ItoIntegrands",
    "Residual",
    "align",
    "brownian_path",
    "calculus_rules",
    "compose",
    "compose_increment",
    "covariation",
    "indicator_path",
    "ito_sum",
    "jump_correction",
    "quadratic_variation",
    "refine",
    "same_grid",
    "through_inverse",
    "union_grid",
    "verify_drift_reclocking",
    "verify_first_cov",
    "verify_product_rule",
    "verify_qv_composition",
    "verify_second_cov",
    "verify_tc_ito",
]
