from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Environment only (ASRBENCH_*). No env file: a command must not read
    # files that are not named in its options.
    model_config = SettingsConfigDict(env_prefix="ASRBENCH_")

    # Trade-off weights. ctc_weight is alpha of the training objective,
    # decoding_ctc_weight / lm_weight are lambda / mu of joint decoding.
    ctc_weight: float = 0.3
    decoding_ctc_weight: float = 0.5
    lm_weight: float = 0.3
    beam_size: int = 20

    # LM text preparation
    chunk_max_len: int = 200
    chunk_overlap: int = 50

    # Segment capping
    max_segment_s: float = 25.0

    # Worker threads for per-utterance / per-recording work. None means
    # os.cpu_count().
    workers: int | None = None

    report_version: str = "1"
    log_level: str = "WARNING"


settings = Settings()
