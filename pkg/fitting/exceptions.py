class ContractError(ValueError):
    """A caller broke the contract of an operation (bad index, empty mesh, ...)."""


class RigDimensionError(ContractError):
    """Weights, meshes and rig disagree on m or n."""


class RigFileError(ValueError):
    """A rig or animation file is malformed or of the wrong kind."""


class NoisyReferenceError(RigFileError):
    """Metrics were requested against a sequence flagged as noisy."""


class DescentViolation(AssertionError):
    """A coordinate update increased the objective."""
