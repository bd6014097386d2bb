"""Exception hierarchy shared by all modules."""
from __future__ import annotations


class PhantomError(Exception):
    """Base class for every error raised by this package."""


class PdfError(PhantomError):
    """The input PDF is malformed or uses an unsupported feature."""


class MalformedHeader(PdfError):
    pass


class XrefNotFound(PdfError):
    pass


class UnsupportedEncryption(PdfError):
    pass


class CircularReference(PdfError):
    pass


class UnresolvableReference(PdfError):
    pass


class UnsupportedFilter(PdfError):
    pass


class CorruptStream(PdfError):
    pass


class PdfSyntaxError(PdfError):
    """Generic lexing/parsing failure with a byte offset."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (offset {offset})"
        super().__init__(message)
        self.offset = offset


class UnbalancedString(PdfSyntaxError):
    pass


class DanglingOperands(PdfSyntaxError):
    pass


class UnterminatedInlineImage(PdfSyntaxError):
    pass


class ExtractionError(PhantomError):
    def __init__(self, page_index: int, cause: Exception):
        super().__init__(f"page {page_index}: {cause}")
        self.page_index = page_index
        self.cause = cause


class InjectionError(PhantomError):
    pass


class EmptyPayload(InjectionError):
    pass


class EncryptedDocument(InjectionError):
    pass


class PerturbationError(PhantomError):
    pass


class CorpusTooSmall(PerturbationError):
    pass


class LlmRequired(PerturbationError):
    pass


class LlmError(PhantomError):
    """Any failure talking to the completion backend."""


class LlmUnavailable(LlmError):
    pass


class LlmRefusal(LlmError):
    pass


class MissingApiKey(LlmError):
    pass


class LlmTimeout(LlmError):
    pass


class HttpError(LlmError):
    def __init__(self, status: int, body: str = ""):
        super().__init__(f"HTTP {status}")
        self.status = status
        self.body = body


class MalformedResponse(LlmError):
    pass


class StubFail(LlmError):
    pass
