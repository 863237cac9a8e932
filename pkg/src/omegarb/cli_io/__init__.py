"""Problem files, reports and the ``omegarb`` command line."""

from __future__ import annotations

from .schema import SCHEMA, Problem, canonical, dump, dumps, from_document, load, loads, to_document

__all__ = ["SCHEMA", "Problem", "canonical", "dump", "dumps", "from_document", "load", "loads", "to_document"]
