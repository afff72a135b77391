"""Query-aware context reduction for retrieval-augmented QA."""

from ._leanctx import (
    Chunk,
    CompressedFragment,
    Context,
    HashEmbedder,
    LeanctxError,
    Pipeline,
    PromptKind,
    RankedSentence,
    ReducedContext,
    RLAgent,
    RougeScore,
    RuleTokenizer,
    Token,
    compute_reward,
    cost_savings,
    load_agent,
    render_prompt,
    rouge_l,
    rouge_n,
    save_agent,
    segment_sentences,
)

__all__ = [
    "Chunk",
    "CompressedFragment",
    "Context",
    "HashEmbedder",
    "LeanctxError",
    "Pipeline",
    "PromptKind",
    "RankedSentence",
    "ReducedContext",
    "RLAgent",
    "RougeScore",
    "RuleTokenizer",
    "Token",
    "compute_reward",
    "cost_savings",
    "load_agent",
    "render_prompt",
    "rouge_l",
    "rouge_n",
    "save_agent",
    "segment_sentences",
]
