"""Generators, oracles and training targets for the synthetic task families."""

from kedro_selfnotes.corpus.sample import NoteAnnotation, Sample, TASKS
from kedro_selfnotes.corpus.vocabulary import Vocabulary

__all__ = ["NoteAnnotation", "Sample", "TASKS", "Vocabulary"]
