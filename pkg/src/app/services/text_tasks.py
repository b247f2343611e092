"""Handlers for the text-preparation commands."""

import logging
from typing import Any

from src.app.bpe import bpe_train, decode_tokens, dump_bpe, encode_tokens, parse_bpe
from src.app.buckwalter import arabic_to_bw, bw_to_arabic, load_table
from src.app.chunker import chunk_text
from src.app.errors import UsageProblem
from src.app.glm import apply_glm
from src.app.models import NormalizationPolicy, Transcript
from src.app.services.command_runner import handler
from src.app.services.loaders import load_rules, load_transcripts
from src.app.services.run_tracker import RunContext
from src.app.text_normalizer import clean_text, normalize
from src.app.transcript_io import format_transcripts

logger = logging.getLogger(__name__)

POLICY_FLAGS = tuple(NormalizationPolicy.model_fields)


def policy_from_options(opts: dict[str, Any]) -> NormalizationPolicy:
    return NormalizationPolicy(**{flag: opts[flag] for flag in POLICY_FLAGS if flag in opts})


def _token_count(transcripts: list[Transcript]) -> int:
    return sum(len(t.tokens) for t in transcripts)


@handler("normalize")
def normalize_handler(opts: dict[str, Any], ctx: RunContext) -> dict[str, Any]:
    transcripts = load_transcripts(ctx, opts["input"], opts.get("format", "kaldi"))
    policy = policy_from_options(opts)
    normalized = [normalize(t, policy) for t in transcripts]
    ctx.write_text(opts["output"], format_transcripts(normalized, opts.get("format", "kaldi")))
    return {
        "utterances": len(normalized),
        "tokens_in": _token_count(transcripts),
        "tokens_out": _token_count(normalized),
        "policy": policy.model_dump(),
    }


@handler("bw")
def bw_handler(opts: dict[str, Any], ctx: RunContext) -> dict[str, Any]:
    direction = opts.get("direction", "to-arabic")
    if direction not in ("to-arabic", "to-bw"):
        raise UsageProblem(f"unknown direction {direction!r}; choose to-arabic or to-bw")
    fmt = opts.get("format", "kaldi")
    transcripts = load_transcripts(ctx, opts["input"], fmt)
    convert = bw_to_arabic if direction == "to-arabic" else arabic_to_bw
    side = 0 if direction == "to-arabic" else 1
    known = {pair[side] for pair in load_table()}

    passthrough = 0
    out = []
    for t in transcripts:
        passthrough += sum(1 for token in t.tokens for ch in token if ch not in known)
        out.append(t.with_tokens(convert(tok) for tok in t.tokens))
    if passthrough:
        logger.warning("%d character(s) outside the Buckwalter table passed through unchanged", passthrough)
    ctx.write_text(opts["output"], format_transcripts(out, fmt))
    return {"utterances": len(out), "direction": direction, "passthrough_chars": passthrough}


@handler("glm")
def glm_handler(opts: dict[str, Any], ctx: RunContext) -> dict[str, Any]:
    fmt = opts.get("format", "kaldi")
    transcripts = load_transcripts(ctx, opts["input"], fmt)
    rules = load_rules(ctx, opts["glm"])
    mapped = [apply_glm(rules, t) for t in transcripts]
    changed = sum(1 for before, after in zip(transcripts, mapped) if before != after)
    ctx.write_text(opts["output"], format_transcripts(mapped, fmt))
    return {"utterances": len(mapped), "rewritten": changed, "rules": len(rules.rules)}


def lm_text(opts: dict[str, Any], ctx: RunContext) -> list[Transcript]:
    """Transcripts of ``input``, cleaned when ``clean`` is set."""
    transcripts = load_transcripts(ctx, opts["input"], opts.get("format", "kaldi"))
    if opts.get("clean"):
        transcripts = [t.with_tokens(clean_text(t.text)) for t in transcripts]
    return transcripts


@handler("chunk")
def chunk_handler(opts: dict[str, Any], ctx: RunContext) -> dict[str, Any]:
    max_len, overlap = opts["max_len"], opts["overlap"]
    documents = lm_text(opts, ctx)
    chunks: list[Transcript] = []
    for doc in documents:
        for i, piece in enumerate(chunk_text(doc.tokens, max_len, overlap)):
            chunks.append(Transcript(f"{doc.utt_id}_{i:04d}", tuple(piece)))
    ctx.write_text(opts["output"], format_transcripts(chunks))
    return {
        "documents": len(documents),
        "chunks": len(chunks),
        "tokens": _token_count(documents),
        "max_len": max_len,
        "overlap": overlap,
    }


@handler("bpe-train")
def bpe_train_handler(opts: dict[str, Any], ctx: RunContext) -> dict[str, Any]:
    corpus = lm_text(opts, ctx)
    model = bpe_train(corpus, opts["merges"])
    ctx.write_text(opts["output"], dump_bpe(model))
    return {
        "merges": len(model.merges),
        "requested_merges": opts["merges"],
        "base_symbols": sorted(model.base_symbols),
    }


@handler("bpe-apply")
def bpe_apply_handler(opts: dict[str, Any], ctx: RunContext) -> dict[str, Any]:
    fmt = opts.get("format", "kaldi")
    transcripts = load_transcripts(ctx, opts["input"], fmt)
    if opts.get("decode"):
        out = [t.with_tokens(decode_tokens(t.tokens)) for t in transcripts]
    else:
        if opts.get("model") is None:
            raise UsageProblem("bpe-apply needs --model unless --decode is given")
        model = parse_bpe(ctx.read_text(opts["model"]), opts["model"])
        out = [t.with_tokens(encode_tokens(model, t.tokens)) for t in transcripts]
    ctx.write_text(opts["output"], format_transcripts(out, fmt))
    return {
        "utterances": len(out),
        "tokens_in": _token_count(transcripts),
        "tokens_out": _token_count(out),
        "decode": bool(opts.get("decode")),
    }
