"""Toolkit for building ASR corpora from long recordings and imperfect transcripts.

The pipeline stages are plain functions over plain dataclasses:

- `textnorm`: declarative, language-tagged text normalization
- `metrics`: edit distance and character error rate
- `segmenter`: cut voice-activity regions into utterance-sized segments
- `aligner`: find the transcript span a hypothesis came from
- `pairing`: match audio sessions to transcript documents by metadata
- `transcriber`: simulated ASR channel with a learning curve
- `refinement`: multi-pass align / retrain / re-align loop
- `manifest`: dataset records, filtering, splits, and statistics
- `cli`: file-based front end over all of the above
"""

from __future__ import annotations

from .errors import (
    ConfigError,
    CorpusError,
    DataError,
    IncomparableError,
    InconclusiveError,
    NoCandidateError,
    SplitInfeasibleError,
)
from .metrics import CerValue, banded_levenshtein, cer, levenshtein

__version__ = "0.1.0"

from .aligner import (  # noqa: E402
    AlignmentMatch,
    AlignParams,
    SessionYield,
    TranscriptDoc,
    align_coarse_to_fine,
    align_exhaustive,
    align_session,
    fast_edit_distance,
)
from .manifest import (  # noqa: E402
    FilterPredicate,
    ManifestRecord,
    SplitParams,
    StatsReport,
    filter_records,
    read_manifest,
    record_from_dict,
    record_from_match,
    record_to_dict,
    render_stats,
    split_records,
    stats,
    write_manifest,
)
from .pairing import (  # noqa: E402
    PairCandidate,
    PairingResult,
    PairWeights,
    SessionMeta,
    pair_score,
    pair_sessions,
    parse_session_date,
    validate_pair,
    validated_candidate,
)
from .refinement import (  # noqa: E402
    PassReport,
    RefineConfig,
    RefineOutcome,
    refine,
    run_pass,
    run_refinement,
)
from .segmenter import (  # noqa: E402
    Segment,
    SegmentationResult,
    SegmenterParams,
    SpeechRegion,
    segment_session,
)
from .textnorm import (  # noqa: E402
    NormRuleSet,
    load_rule_set,
    normalize,
    parse_rule_set,
)
from .transcriber import (  # noqa: E402
    LearningCurve,
    NoiseParams,
    PerfectTranscriber,
    SimAudio,
    SimulatedTranscriber,
    Transcriber,
    TranscriberFactory,
    fixed_transcriber,
    improved_params,
    learning_curve_transcriber,
    transcribe,
)

__all__ = [
    "AlignParams",
    "AlignmentMatch",
    "CerValue",
    "ConfigError",
    "CorpusError",
    "DataError",
    "FilterPredicate",
    "IncomparableError",
    "InconclusiveError",
    "LearningCurve",
    "ManifestRecord",
    "NoCandidateError",
    "NoiseParams",
    "NormRuleSet",
    "PairCandidate",
    "PairWeights",
    "PairingResult",
    "PassReport",
    "PerfectTranscriber",
    "RefineConfig",
    "RefineOutcome",
    "Segment",
    "SegmentationResult",
    "SegmenterParams",
    "SessionMeta",
    "SessionYield",
    "SimAudio",
    "SimulatedTranscriber",
    "SpeechRegion",
    "SplitInfeasibleError",
    "SplitParams",
    "StatsReport",
    "Transcriber",
    "TranscriberFactory",
    "TranscriptDoc",
    "align_coarse_to_fine",
    "align_exhaustive",
    "align_session",
    "banded_levenshtein",
    "cer",
    "fast_edit_distance",
    "filter_records",
    "fixed_transcriber",
    "improved_params",
    "learning_curve_transcriber",
    "levenshtein",
    "load_rule_set",
    "normalize",
    "pair_score",
    "pair_sessions",
    "parse_session_date",
    "parse_rule_set",
    "read_manifest",
    "record_from_dict",
    "record_from_match",
    "record_to_dict",
    "refine",
    "render_stats",
    "run_pass",
    "run_refinement",
    "segment_session",
    "split_records",
    "stats",
    "transcribe",
    "validate_pair",
    "validated_candidate",
    "write_manifest",
    "__version__",
]
