"""Exception hierarchy.

``ValidationError`` covers malformed input (CLI exit 2); ``CheckFailure``
carries a failed mathematical invariant (CLI exit 1) together with a short
tag naming the check.
"""


class LinkSympError(Exception):
    pass


class ValidationError(LinkSympError, ValueError):
    pass


class UnreachableError(ValidationError):
    """Two points of H_d that no sequence of twists connects."""


class BoundedSearchError(LinkSympError):
    """A search gave up after its state budget; the answer exists but is unknown."""


class NoPathError(LinkSympError):
    pass


class PreconditionError(LinkSympError):
    """An operation was called outside the locus where its statement holds."""

    def __init__(self, message: str, hypothesis: str = ""):
        super().__init__(message)
        self.hypothesis = hypothesis


class CheckFailure(LinkSympError):
    def __init__(self, tag: str, message: str, detail=None):
        super().__init__(f"[{tag}] {message}")
        self.tag = tag
        self.detail = detail
