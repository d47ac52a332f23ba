"""Exception hierarchy shared by every module."""


class PermstabError(Exception):
    pass


class NotAGroup(PermstabError):
    pass


class GroupTooLarge(PermstabError):
    pass


class NotAnAction(PermstabError):
    pass


class Incompatible(PermstabError):
    pass


class NonInjectiveEdgeMap(PermstabError):
    pass


class Disconnected(PermstabError):
    pass


class BadInvolution(PermstabError):
    pass


class VertexActionBroken(PermstabError):
    pass


class DegreeMismatch(PermstabError):
    pass


class BadPad(PermstabError):
    pass


class PreconditionFailed(PermstabError):
    pass


class InternalInvariantBroken(PermstabError):
    pass


class TooLarge(PermstabError):
    pass
