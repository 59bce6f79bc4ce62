"""Constrained segmentation of unpunctuated transcripts."""

from ._segfst import *  # noqa: F401,F403
from ._segfst import SegfstError, NotWellformedError, PythonScorer

DELIMITER = "<SENT>"

__version__ = "0.1.0"
