"""CLI commands."""

from .bench_cmd import bench
from .decode_cmd import decode, lm_train, ppl
from .kernels_cmd import kernels_check
from .score_cmd import errors, gap, matrix, mr_score, score
from .segment_cmd import cap, durstats, vad
from .text_cmd import bpe_apply, bpe_train, bw, chunk, glm, normalize

__all__ = [
    "bench",
    "bpe_apply",
    "bpe_train",
    "bw",
    "cap",
    "chunk",
    "decode",
    "durstats",
    "errors",
    "gap",
    "glm",
    "kernels_check",
    "lm_train",
    "matrix",
    "mr_score",
    "normalize",
    "ppl",
    "score",
    "vad",
]
