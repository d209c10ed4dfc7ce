"""Exception hierarchy shared by all millpath modules."""


class MillError(Exception):
    """Base class for every error raised by this package."""


class InputError(MillError):
    """Bad user input: missing files, parse failures, invalid configuration.

    The CLI maps these to exit code 2.
    """


class MeshError(InputError):
    """Rejected mesh: parse failure, non-manifold edges, inconsistent
    orientation or degenerate facets."""


class ComputationError(MillError):
    """A geometric computation could not complete (no root bracketed,
    projection ray too short, too many failed section frames, ...).

    The CLI maps these to exit code 1.
    """
