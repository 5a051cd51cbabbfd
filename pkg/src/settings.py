"""
Application settings for the Trace-Net checker.

- Defaults reproduce the zero-delay, no-reorg exploration used for design review.
- For testing, override via pyproject.toml [tool.pytest.ini_options].
- For CI, set TRACENET_* environment variables; command-line flags and contract
  file parameters take precedence over these values.
"""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

DEFAULT_MESSAGE_KINDS = ("Signature", "Preimage", "PreSignature", "AdaptorPriv")


class Settings(BaseSettings):
    """Trace-Net checker configuration."""

    # Exploration
    state_budget: int = Field(
        default=1_000_000,
        ge=1,
        description="Maximum number of reachability graph nodes before aborting",
    )
    conf_delay_int: int = Field(
        default=0,
        ge=0,
        description="Blocks the internal actor waits between broadcast and confirmation",
    )
    conf_delay_ext: int = Field(
        default=0,
        ge=0,
        description="Blocks the external actor waits between broadcast and confirmation",
    )
    reorg_depth: int = Field(
        default=0,
        ge=0,
        description="Deepest chain reorganization the adversary may fire",
    )

    # Messaging
    message_kinds: list[str] = Field(
        default=list(DEFAULT_MESSAGE_KINDS),
        description="Knowledge object kinds actors may send each other directly",
    )

    # Logging
    log_level: str = Field(default="INFO", description="Root log level for the CLI")

    model_config = SettingsConfigDict(
        env_prefix="TRACENET_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    def model_post_init(self, __context: object) -> None:
        """Normalize derived settings after model construction."""
        self.log_level = self.log_level.upper()


settings = Settings()
