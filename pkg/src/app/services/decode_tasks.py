"""Handlers for decoding and language-model commands."""

import logging
from pathlib import Path
from typing import Any

from src.app.beam_search import DecodeError, TableScorer, beam_sweep, joint_beam_search, parse_table_scorer
from src.app.chunker import chunk_text
from src.app.config import settings
from src.app.ctc import ctc_greedy
from src.app.errors import FileFormatError, UsageProblem
from src.app.models import CombineConfig, PosteriorMatrix, Transcript, Vocab
from src.app.ngram_lm import NgramLm, dump_lm, lm_train, parse_lm, perplexity
from src.app.posterior_io import parse_posterior
from src.app.services.command_runner import handler
from src.app.services.loaders import load_transcripts
from src.app.services.run_tracker import RunContext
from src.app.services.workers import ordered_map
from src.app.services.text_tasks import lm_text

logger = logging.getLogger(__name__)


def _load_posteriors(ctx: RunContext, paths: list[Path]) -> tuple[dict[str, PosteriorMatrix], Vocab]:
    """Posterior files keyed by file stem; all must share one vocabulary."""
    posteriors: dict[str, PosteriorMatrix] = {}
    vocab: Vocab | None = None
    for path in paths:
        post, file_vocab = parse_posterior(ctx.read_text(path), path)
        if vocab is None:
            vocab = file_vocab
        elif file_vocab != vocab:
            raise FileFormatError(path, 2, "the vocabulary of the first posterior file", " ".join(file_vocab.symbols))
        utt_id = Path(path).stem
        if utt_id in posteriors:
            raise UsageProblem(f"two posterior files share the utterance id {utt_id!r}")
        posteriors[utt_id] = post
    if vocab is None:
        raise UsageProblem("decode needs at least one --post file")
    return posteriors, vocab


def _load_table(ctx: RunContext, path: Path) -> TableScorer:
    return parse_table_scorer(ctx.read_text(path), path)


def _load_lm(ctx: RunContext, path: Path | None) -> NgramLm | None:
    if path is None:
        return None
    return parse_lm(ctx.read_text(path), path)


def _parse_beams(text: str) -> list[int]:
    try:
        beams = [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageProblem(f"--sweep: expected comma-separated beam sizes, got {text!r}") from exc
    if not beams or min(beams) < 1:
        raise UsageProblem(f"--sweep: beam sizes must be >= 1, got {text!r}")
    return beams


@handler("decode")
def decode_handler(opts: dict[str, Any], ctx: RunContext) -> dict[str, Any]:
    posteriors, vocab = _load_posteriors(ctx, list(opts["post"]))
    cfg = CombineConfig(
        lam=opts.get("lam", settings.decoding_ctc_weight),
        mu=opts.get("mu", settings.lm_weight),
    )
    dec = _load_table(ctx, opts["dec"]) if opts.get("dec") is not None else None
    lm = _load_lm(ctx, opts.get("lm"))

    if opts.get("sweep"):
        if opts.get("ref") is None:
            raise UsageProblem("--sweep needs --ref transcripts to score against")
        refs = load_transcripts(ctx, opts["ref"])
        rows, timings = beam_sweep(
            posteriors,
            vocab,
            _parse_beams(opts["sweep"]),
            refs,
            cfg,
            dec,
            lm,
            frame_shift_s=opts.get("frame_shift_ms", 40.0) / 1000.0,
        )
        ctx.timings["sweep"] = timings
        return {"sweep": rows, "utterance_count": len(posteriors)}

    beam = opts.get("beam", settings.beam_size)
    if beam < 1:
        raise DecodeError(f"beam must be >= 1, got {beam}")
    nbest = opts.get("nbest", 1)
    utt_ids = sorted(posteriors)

    def decode_one(utt_id: str) -> list[dict]:
        hyps = joint_beam_search(
            posteriors[utt_id],
            vocab,
            beam,
            cfg,
            dec,
            lm,
            max_len=opts.get("max_len"),
            length_norm=opts.get("length_norm", False),
            nbest=nbest,
        )
        return [h.to_dict() for h in hyps]

    results = ordered_map(decode_one, utt_ids, opts.get("workers"))
    utterances = {utt_id: hyps for utt_id, hyps in zip(utt_ids, results)}
    payload: dict[str, Any] = {"beam": beam, "utterances": utterances}
    if opts.get("greedy"):
        payload["greedy"] = {u: ctc_greedy(posteriors[u], vocab) for u in utt_ids}
    if opts.get("output") is not None:
        best = [Transcript(u, tuple(hyps[0]["tokens"]) if hyps else ()) for u, hyps in utterances.items()]
        ctx.write_text(opts["output"], "".join(f"{t.utt_id} {t.text}".rstrip() + "\n" for t in best))
    return payload


def _training_text(opts: dict[str, Any], ctx: RunContext) -> list[Transcript]:
    transcripts = lm_text(opts, ctx)
    if opts.get("chunk"):
        max_len = opts.get("max_len", settings.chunk_max_len)
        overlap = opts.get("overlap", settings.chunk_overlap)
        transcripts = [
            Transcript(f"{t.utt_id}_{i:04d}", tuple(piece))
            for t in transcripts
            for i, piece in enumerate(chunk_text(t.tokens, max_len, overlap))
        ]
    return transcripts


@handler("lm-train")
def lm_train_handler(opts: dict[str, Any], ctx: RunContext) -> dict[str, Any]:
    corpus = _training_text(opts, ctx)
    lm = lm_train(corpus, opts.get("order", 3), opts.get("k", 1.0))
    ctx.write_text(opts["output"], dump_lm(lm))
    return {
        "order": lm.order,
        "k": lm.k,
        "vocab_size": len(lm.vocab),
        "contexts": len(lm.counts),
        "utterances": len(corpus),
    }


@handler("ppl")
def ppl_handler(opts: dict[str, Any], ctx: RunContext) -> dict[str, Any]:
    lm = parse_lm(ctx.read_text(opts["lm"]), opts["lm"])
    text = _training_text(opts, ctx)
    events = sum(len(t.tokens) + 1 for t in text)
    return {"perplexity": perplexity(lm, text), "events": events, "utterances": len(text), "order": lm.order}
