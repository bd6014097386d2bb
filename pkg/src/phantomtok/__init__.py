"""Phantom-token injection and auditing for PDF documents.

Rewrites page content streams so that size-zero text sits between segments of
the visible text. Viewers render the page unchanged, while readers that consume
the operator stream ingest the inserted words.
"""
from phantomtok.pdf import Document, parse_document, write_document
from phantomtok.inject import InjectionConfig, InjectionReport, inject_payload
from phantomtok.extraction import extract_text, list_hidden_runs

__version__ = "0.1.0"

__all__ = [
    "Document",
    "InjectionConfig",
    "InjectionReport",
    "extract_text",
    "inject_payload",
    "list_hidden_runs",
    "parse_document",
    "write_document",
]
