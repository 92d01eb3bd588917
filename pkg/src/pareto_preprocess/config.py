import os
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from pareto_preprocess.core.schema import QueueOrder


class Settings(BaseSettings):
    retrieval_cost: float = Field(10.0, description="Cost C charged per point retrieval")
    ratio_retrieval: float = Field(
        8.0, description="Allowed retrievals per interesting region in verify_run"
    )
    ratio_predicates: float = Field(
        8.0, description="Allowed galloping evaluations per charged log term"
    )
    debug_assert: bool = Field(
        False, description="Cross-check every reconstruction step with brute force"
    )
    queue_order: QueueOrder = Field(
        QueueOrder.FIFO, description="Subproblem queue discipline"
    )
    queue_seed: int = Field(0, description="Seed for the random queue discipline")
    front_type_limit: int = Field(
        5, description="Largest region count accepted by the front type enumeration"
    )
    max_placements: int = Field(
        200_000, description="Largest candidate grid the enumeration will walk"
    )
    generator_attempts: int = Field(
        5, description="Generator attempts before giving up on an instance"
    )
    bench_workers: int = Field(4, description="Parallel workers used by bench")

    model_config = SettingsConfigDict(
        env_prefix="PARETO_",
        env_file=(
            ".env",
            os.path.expanduser("~/.config/pareto_preprocess/.env"),
        ),
        env_file_encoding="utf-8",
        extra="ignore",
    )


settings = Settings()
