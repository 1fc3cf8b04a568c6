"""Pydantic request/response models for the HTTP surface."""

from __future__ import annotations

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str = "ok"
    version: str = ""


class DiscoverRequest(BaseModel):
    data_csv: str = Field(description="CSV text of the relation instance")
    has_header: bool = True
    ontology: dict = Field(description="Ontology document (classes/senses)")
    kinds: list[str] = Field(default=["syn"], description="syn, inh and/or fd")
    theta: int = Field(default=2, ge=0, description="Inheritance distance bound")
    kappa: float = Field(default=1.0, gt=0, le=1, description="Minimum support")
    opts: str = Field(default="234", description="Enabled pruning toggles, e.g. '24'")
    max_level: int | None = Field(default=None, ge=1)
    exclude: list[str] = Field(default_factory=list)
    threads: int = Field(default=1, ge=1)
    verify_with_oracle: bool = Field(
        default=False,
        description="Cross-check the result against brute-force enumeration "
        "(small inputs only)",
    )


class DiscoverResponse(BaseModel):
    ofds: list[str]
    stats: dict
    oracle_match: bool | None = None


class InferRequest(BaseModel):
    sigma: list[str] = Field(description="Dependencies, one text line each")
    closure_of: list[str] | None = None
    implies_line: str | None = None
    minimal_cover: bool = False


class InferResponse(BaseModel):
    closure: list[str] | None = None
    implies: bool | None = None
    minimal_cover: list[str] | None = None


class AssignSensesRequest(BaseModel):
    data_csv: str
    has_header: bool = True
    ontology: dict
    ofds: list[str]
    theta_emd: float = Field(default=10.0, ge=0)


class AssignSensesResponse(BaseModel):
    assignments: list[dict]
    literal_classes: list[list[int]]


class CleanRequest(BaseModel):
    data_csv: str
    has_header: bool = True
    ontology: dict
    ofds: list[str]
    senses: list[dict] | None = Field(
        default=None, description="Precomputed sense triples; computed when absent"
    )
    theta_emd: float = 10.0
    tau: float | None = Field(
        default=None,
        description="Max data edits: a count, or a fraction below 1 of the "
        "consequent cell count; omit for no limit",
    )
    beam: int | None = Field(default=None, ge=1)
    k_max: int | None = Field(default=None, ge=0)


class CleanResponse(BaseModel):
    repairs: list[dict]
    report: dict
    feasible: bool


class InjectRequest(BaseModel):
    data_csv: str
    has_header: bool = True
    ontology: dict
    ofds: list[str]
    err: float = Field(ge=0, le=1)
    inc: float = Field(ge=0, le=1)
    mode: str = "mixed"
    seed: int


class InjectResponse(BaseModel):
    dirty_csv: str
    reduced_ontology: dict
    truth_log: dict


class ScoreRequest(BaseModel):
    repair: dict
    truth_log: dict


class ScoreResponse(BaseModel):
    precision: float
    recall: float
    onto_precision: float
    onto_recall: float


class BenchRequest(BaseModel):
    ns: list[int]
    arities: list[int]
    seed: int = 7
    kappa: float = 1.0


class BenchResponse(BaseModel):
    rows: list[dict]
    csv: str
