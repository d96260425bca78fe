"""Decoding controllers that interleave notes with the context."""

from kedro_selfnotes.notectl.config import DecodeConfig
from kedro_selfnotes.notectl.decoding import (
    DecodeResult,
    TriggerEvent,
    answer_confidence,
    boost_distribution,
    decode,
    decode_scratchpad,
    decode_selfnotes,
    decode_vanilla,
    decode_with_gold_notes,
    multi_sample_enrich,
)
from kedro_selfnotes.notectl.enriched import EnrichedContext, Segment

__all__ = [
    "DecodeConfig",
    "DecodeResult",
    "EnrichedContext",
    "Segment",
    "TriggerEvent",
    "answer_confidence",
    "boost_distribution",
    "decode",
    "decode_scratchpad",
    "decode_selfnotes",
    "decode_vanilla",
    "decode_with_gold_notes",
    "multi_sample_enrich",
]
