"""
Exception hierarchy for floodlab.

Library code raises these; the command line turns them into log messages
and exit codes.
"""


class FloodlabError(Exception):
    """Base class for every error raised by floodlab."""


class ConfigError(FloodlabError, ValueError):
    """Invalid scenario, split, training or pipeline configuration."""


class TopologyError(ConfigError):
    """The requested network cannot be built."""


class SchedulingError(FloodlabError, ValueError):
    """An event was scheduled before the current simulation time."""


class DataError(FloodlabError, ValueError):
    """A table or matrix does not satisfy an operation's preconditions."""


class SchemaError(DataError):
    """Columns are missing, unexpected or inconsistent between inputs."""


class ShapeError(FloodlabError, ValueError):
    """Tensor shapes do not compose."""


class TrainingError(FloodlabError, RuntimeError):
    """Training diverged (non-finite loss) or could not start."""


class StageError(FloodlabError):
    """
    A pipeline stage failed.

    Args:
        stage (str): Name of the stage (simulate, dataset, ...).
        cause (BaseException): The underlying error.
    """

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage} failed: {cause}")
