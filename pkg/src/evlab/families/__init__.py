"""Hypothesis models and e-statistic constructors."""
from .betting import AGRAPALambda, FixedLambda, GridMixtureLambda, LambdaStrategy, bounded_mean_eprocess
from .estimators import (
    BoundedMeanEProcess,
    ConstantEProcess,
    EProcessEstimator,
    GaussianEProcess,
    GaussianMixtureEProcess,
    LikelihoodRatioEProcess,
    MixtureUniversalEProcess,
    TTestEProcess,
    UniversalInferenceEProcess,
)
from .likelihood import (
    FixedPlugin,
    GaussianMeanPlugin,
    KTPlugin,
    PredictivePlugin,
    gaussian_eprocess,
    gaussian_evar,
    gaussian_mixture_eprocess,
    glr,
    lr_eprocess,
    mixture_universal,
    mixture_universal_trace,
    universal_inference,
    universal_inference_trace,
)
from .models import (
    BernoulliFamily,
    BernoulliModel,
    BetaModel,
    BoundedMeanNull,
    CompositeNull,
    GaussianMeanFamily,
    GaussianModel,
    Interval,
    TTestPrior,
)
from .ttest import ttest_eprocess
