"""Sequential sampling models (DDM, LBA, RDM) backed by a C++ core."""

from ._core import (
    DDM,
    LBA,
    RDM,
    Chains,
    Dataset,
    DomainError,
    NumericError,
    ParseError,
    cdf,
    chains_svg,
    choice_prob,
    fit_mle,
    histogram_svg,
    logpdf,
    loglik,
    model_from_json,
    model_json,
    model_svg,
    pdf,
    read_dataset,
    read_model,
    sample,
    sample_posterior,
    validate,
    write_dataset,
)

__all__ = [
    "DDM",
    "LBA",
    "RDM",
    "Chains",
    "Dataset",
    "DomainError",
    "NumericError",
    "ParseError",
    "cdf",
    "chains_svg",
    "choice_prob",
    "fit_mle",
    "histogram_svg",
    "logpdf",
    "loglik",
    "model_from_json",
    "model_json",
    "model_svg",
    "pdf",
    "read_dataset",
    "read_model",
    "sample",
    "sample_posterior",
    "validate",
    "write_dataset",
]
