"""Exception types raised across the pipeline."""


class InvalidArgument(ValueError):
    """An argument violates an operation's precondition."""


class NoMotionDetected(RuntimeError):
    """No start point was found in a Doppler-time history."""


class DatasetBuildError(RuntimeError):
    """Too many samples were dropped while synthesizing a dataset."""
