from norm_approx.core.datastructures.params import (  # noqa
    NormFamily,
    NormParams,
)
from norm_approx.core.datastructures.reports import (  # noqa
    ErrorReport,
    SamplerConfig,
)
from norm_approx.core.datastructures.vectors import (  # noqa
    VectorN,
    WeightProfile,
)
from norm_approx.core.norms import (  # noqa
    P_INF,
    norm_p,
    norm_weighted,
)
from norm_approx.core.optimal_params import (  # noqa
    params_for,
    weight_profile_of,
)
from norm_approx.core.sampling import (  # noqa
    converged_errors,
    empirical_errors,
    mre_theoretical,
)
