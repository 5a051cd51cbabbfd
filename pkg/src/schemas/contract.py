"""
Versioned JSON document describing a contract after its setup phase.

The document is the materialized output of template generation plus setup: who
holds which secrets, which outputs are funded on chain, the unsigned templates with
their output scripts as fragment text, and the exploration parameters.
"""

from typing import Literal

from pydantic import BaseModel, Field, field_validator, model_validator

from src.knowledge.objects import Actor

LABEL_PATTERN = r"^[A-Za-z0-9_.\-]+$"
PREVOUT_PATTERN = r"^[A-Za-z0-9_.\-]+:[0-9]+$"


class SetupSignature(BaseModel):
    """Signature handed over during setup, e.g. a counterparty-signed refund."""

    key: str = Field(description="Key id of the signing key")
    template: str = Field(description="Label of the signed template")


class ActorSetup(BaseModel):
    """Secrets an actor holds and the templates it knows after setup."""

    name: str = Field(default="", description="Display name, e.g. Alice")
    keys: list[str] = Field(description="Key ids whose private keys the actor holds")
    preimages: list[str] = Field(
        default_factory=list, description="Digests whose preimages the actor holds"
    )
    adaptor_secrets: list[str] = Field(
        default_factory=list, description="Adaptor key ids whose secrets the actor holds"
    )
    signatures: list[SetupSignature] = Field(
        default_factory=list, description="Signatures received during setup"
    )
    templates: list[str] | None = Field(
        default=None,
        description="Template labels known after setup; all declared templates if omitted",
    )


class FundingOutput(BaseModel):
    """An output that exists before the contract starts."""

    txid: str = Field(pattern=LABEL_PATTERN, description="Identifier of the funding tx")
    index: int = Field(default=0, ge=0)
    value: int = Field(ge=0, description="Coin units")
    script: str = Field(description="Output script as fragment text")
    confirmed_height: int | None = Field(
        default=0,
        ge=0,
        description="Confirmation height; null for an output that is not on chain",
    )


class InputDocument(BaseModel):
    """Template input."""

    prevout: str = Field(
        pattern=PREVOUT_PATTERN, description="<funding txid or template label>:<index>"
    )
    older: int = Field(default=0, ge=0, description="Relative lock in blocks")
    path: int | None = Field(
        default=None, ge=0, description="Committed execution path of the spent output"
    )


class OutputDocument(BaseModel):
    """Template output."""

    value: int = Field(ge=0)
    script: str


class TemplateDocument(BaseModel):
    """Unsigned transaction template."""

    label: str = Field(pattern=LABEL_PATTERN)
    inputs: list[InputDocument] = Field(min_length=1)
    outputs: list[OutputDocument] = Field(min_length=1)
    after: int = Field(default=0, ge=0, description="Absolute lock blockheight")


class PreSignatureDocument(BaseModel):
    """Pre-signature exchanged during setup."""

    signer: str = Field(description="Key id of the pre-signing key")
    template: str = Field(description="Label of the pre-signed template")
    adaptor: str = Field(description="Adaptor key id")
    known_by: list[Actor] = Field(default_factory=lambda: [Actor.INT, Actor.EXT])


class ExplorationParameters(BaseModel):
    """Exploration parameters; unset values fall back to settings."""

    conf_delay_int: int | None = Field(default=None, ge=0)
    conf_delay_ext: int | None = Field(default=None, ge=0)
    reorg_depth: int | None = Field(default=None, ge=0)


class ContractDocument(BaseModel):
    """Root of a contract description file."""

    schema_version: Literal["1"] = "1"
    name: str
    description: str = ""
    actors: dict[Actor, ActorSetup]
    digests: list[str] = Field(default_factory=list)
    adaptors: list[str] = Field(default_factory=list)
    presignatures: list[PreSignatureDocument] = Field(default_factory=list)
    funding: list[FundingOutput] = Field(default_factory=list)
    templates: list[TemplateDocument] = Field(default_factory=list)
    initial_height: int = Field(default=0, ge=0, description="Blockheight b0")
    parameters: ExplorationParameters = Field(default_factory=ExplorationParameters)
    extensions: list[str] = Field(
        default_factory=list, description="Knowledge extensions, e.g. adaptor"
    )
    message_kinds: list[str] | None = Field(
        default=None,
        description="Object kinds actors may message; settings default if omitted",
    )
    policy: str | None = Field(default=None, description="e.g. balance:int:100")
    snapshot: list[str] = Field(
        default_factory=list,
        description=(
            "Replay trace reaching the analysed state; confirmations and broadcasts take "
            "an optional actor prefix such as ext:swap_B, otherwise int fires when it can"
        ),
    )

    @field_validator("digests", "adaptors")
    @classmethod
    def validate_unique(cls, v: list[str]) -> list[str]:
        """Identifiers are declared once."""
        if len(set(v)) != len(v):
            raise ValueError("identifiers must be declared exactly once")
        return v

    @model_validator(mode="after")
    def validate_actors(self) -> "ContractDocument":
        """Both the internal and the external actor are declared."""
        if set(self.actors) != {Actor.INT, Actor.EXT}:
            raise ValueError("actors must declare exactly 'int' and 'ext'")
        return self
