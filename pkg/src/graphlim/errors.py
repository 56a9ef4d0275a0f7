"""Exception types shared across the package.

Invalid arguments raise the built-in ValueError; the classes here cover
failures that callers may want to catch separately.
"""


class NumericError(RuntimeError):
    """A computation produced a non-finite value.

    Carries the offending node index and/or the integration time when known.
    """

    def __init__(self, message, node=None, time=None):
        super().__init__(message)
        self.node = node
        self.time = time


class SizeLimitError(ValueError):
    """A problem instance exceeds a documented size bound."""


class DegenerateFiberError(ValueError):
    """A fiber construction produced empty fibers.

    ``nodes`` lists the indices whose fibers came out empty.
    """

    def __init__(self, message, nodes=()):
        super().__init__(message)
        self.nodes = tuple(nodes)


class UnsupportedGroupError(ValueError):
    """Orbit enumeration exceeded the configured cap."""
