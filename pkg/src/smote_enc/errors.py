class DataError(ValueError):
    """Input data violates the dataset contract (bad CSV, bad schema, ...)."""


class SamplerError(ValueError):
    """A sampler's preconditions do not hold for the given dataset."""
