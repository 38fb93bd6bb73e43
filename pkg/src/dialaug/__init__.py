"""Paraphrase-augmented response generation for task-oriented dialog."""

from .corpus import (
    BeliefState,
    Binding,
    Corpus,
    CorpusError,
    DelexUtterance,
    Dialog,
    DialogAct,
    Goal,
    Ontology,
    SchemaViolation,
    SlotSpec,
    Turn,
    TurnContext,
    UnknownSymbol,
    corpus_from_json,
    delexicalize,
    load_canonical,
    relexicalize,
    serialize_acts,
    tokenize,
)
from .textmetrics import BleuConfig, corpus_bleu, diversity, sentence_bleu
from .mining import (
    DialogFunction,
    MiningConfig,
    ParaphrasePair,
    export_pairs,
    extract_dialog_function,
    import_pairs,
    index_by_function,
    mine_pairs,
    orphan_turns,
    relax_for_orphans,
    targets_by_turn,
)
from .augment import (
    FilterVerdict,
    TrainingInstance,
    build_instances,
    filter_generated,
    instance_for_turn,
    utter_sub,
)
from .evaluation import (
    EvalCell,
    EvalReport,
    ValueMemory,
    entity_match_rate,
    evaluate_model,
    gold_results,
    inform_success,
    response_bleu,
    rollout_dialog,
    run_experiment,
    score_results,
    success_f1,
    train_mode,
)
from .synth import synth_corpus

__version__ = "0.1.0"

__all__ = [
    "BeliefState",
    "Binding",
    "BleuConfig",
    "Corpus",
    "CorpusError",
    "DelexUtterance",
    "Dialog",
    "DialogAct",
    "DialogFunction",
    "EvalCell",
    "EvalReport",
    "FilterVerdict",
    "Goal",
    "MiningConfig",
    "Ontology",
    "ParaphrasePair",
    "SchemaViolation",
    "SlotSpec",
    "TrainingInstance",
    "Turn",
    "TurnContext",
    "UnknownSymbol",
    "ValueMemory",
    "build_instances",
    "corpus_bleu",
    "corpus_from_json",
    "delexicalize",
    "diversity",
    "entity_match_rate",
    "evaluate_model",
    "export_pairs",
    "extract_dialog_function",
    "filter_generated",
    "gold_results",
    "import_pairs",
    "index_by_function",
    "inform_success",
    "instance_for_turn",
    "load_canonical",
    "mine_pairs",
    "orphan_turns",
    "relax_for_orphans",
    "relexicalize",
    "response_bleu",
    "rollout_dialog",
    "run_experiment",
    "score_results",
    "sentence_bleu",
    "serialize_acts",
    "success_f1",
    "synth_corpus",
    "targets_by_turn",
    "tokenize",
    "train_mode",
    "utter_sub",
]
