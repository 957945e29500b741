"""True measures: variable transforms, densities and transform ladders."""
from .densities import GaussianDensity, KumaraswamyDensity, LebesgueDensity, UniformDensity, UnitCubeDensity
from .ladder import TransformLadder, ladder_transform
from .normal import norm_cdf, norm_logpdf, norm_ppf
from .transforms import (
    CovarianceFactor,
    GaussianStep,
    KumaraswamyStep,
    TransformStep,
    UniformStep,
    brownian_covariance,
    brownian_motion,
    factorize,
    gaussian_transform,
    kumaraswamy_transform,
    lebesgue_tail_transform,
    uniform_transform,
)


def lebesgue_ladder(d):
    """Ladder mapping the cube onto R^d with Lebesgue (weight 1) target measure."""
    return TransformLadder([lebesgue_tail_transform(d)], target=LebesgueDensity(d))


__all__ = [
    "CovarianceFactor", "GaussianDensity", "GaussianStep", "KumaraswamyDensity", "KumaraswamyStep",
    "LebesgueDensity", "TransformLadder", "TransformStep", "UniformDensity", "UniformStep",
    "UnitCubeDensity", "brownian_covariance", "brownian_motion", "factorize", "gaussian_transform",
    "kumaraswamy_transform", "ladder_transform", "lebesgue_ladder", "lebesgue_tail_transform",
    "norm_cdf", "norm_logpdf", "norm_ppf", "uniform_transform",
]
