"""Exception types shared across the package."""


class DerailwatchError(Exception):
    """Base class for all package-specific errors."""


class UnknownAssociationError(DerailwatchError):
    """Author association string outside the documented GitHub values."""

    def __init__(self, association: str):
        self.association = association
        super().__init__(f"unknown author association: {association!r}")


class EmptyThreadError(DerailwatchError):
    pass


class FirstCommentToxicError(DerailwatchError):
    """Thread starts toxic, so there is no pre-toxicity prefix to analyze."""


class CorpusFormatError(DerailwatchError):
    """Malformed or invariant-violating corpus line."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class EmptyCorpusError(DerailwatchError):
    pass


class NonPositiveDeltaError(DerailwatchError):
    pass


class EmptyPrefixError(DerailwatchError):
    pass


class EmptySummaryError(DerailwatchError):
    pass


class GatewayError(DerailwatchError):
    """Base for chat-completion transport failures."""


class ContextOverflowError(GatewayError):
    def __init__(self, estimated: int, limit: int, step: str = ""):
        self.estimated = estimated
        self.limit = limit
        self.step = step
        where = f" at step {step!r}" if step else ""
        super().__init__(f"estimated {estimated} tokens exceeds limit {limit}{where}")


class ParseFailureError(DerailwatchError):
    """Model output could not be parsed into the expected shape."""

    def __init__(self, raw_text: str, step: str = ""):
        self.raw_text = raw_text
        self.step = step
        where = f" at step {step!r}" if step else ""
        super().__init__(f"unparsable model output{where}: {raw_text!r}")


class ScriptExhaustedError(GatewayError):
    """Scripted mock has no response matching the request."""


class GitHubApiError(DerailwatchError):
    """Base for GitHub client failures."""


class NotFoundError(GitHubApiError):
    pass


class RateLimitedError(GitHubApiError):
    def __init__(self, message: str, retry_after: float | None = None):
        self.retry_after = retry_after
        super().__init__(message)


class TransientError(GitHubApiError):
    pass
