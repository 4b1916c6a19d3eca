"""Typed errors raised by the toolkit."""


class SinkfreeError(Exception):
    """Base class for every domain error."""


class InvalidTuple(SinkfreeError, ValueError):
    """A (p, q, r, s) tuple violates its bounds."""


class DisconnectedBeta(SinkfreeError):
    """The arc matching of a tuple does not close up into one curve."""


class NoPrimitiveTwist(SinkfreeError):
    """No twist makes the given (p, q, r) primitive."""


class SimpleDiagram(SinkfreeError):
    """The diagram has no bigons, so it has no associated branched surface."""

    def __init__(self, msg="simple diagram: no associated branched surface"):
        super().__init__(msg)


class ResultSimple(SinkfreeError):
    """A carrying replacement produced a simple diagram."""


class InternalContradiction(SinkfreeError):
    """A computed state contradicts a proven statement; this signals a bug."""


class FrozenArc(SinkfreeError):
    """A move tried to push an arc that must stay fixed."""


class IllegalCrossing(SinkfreeError):
    """A move tried to push across a boundary circle."""


class PushUndefined(SinkfreeError):
    """The sink tube push precondition does not hold."""


class TriviallySafe(SinkfreeError):
    """Short-circuit: the level has no double points that need pushing."""


class NotCoprime(SinkfreeError, ValueError):
    """Strand slope numerator and denominator share a factor."""


class DegenerateStrand(SinkfreeError):
    """The strand is too short for a sink tube push (p <= 1 or q <= 1)."""


class AnchorViolation(SinkfreeError):
    """A descent reached q = 1 although the anchor point is present."""
