"""Pydantic request and response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class MarketIn(BaseModel):
    probs: list[float]
    underlying: list[float]
    labels: list[str] | None = None


class CallQuoteIn(BaseModel):
    k: float
    price: float


class PricingIn(BaseModel):
    bond: float
    calls: list[CallQuoteIn]


class LegOut(BaseModel):
    strike: float
    weight: float


class PortfolioOut(BaseModel):
    cash: float
    legs: list[LegOut]


class CertificatePairOut(BaseModel):
    """Two states in one underlying level set where the claim differs."""

    state_i: int
    state_j: int
    cell: list[int]
    value_i: float
    value_j: float


class ReportRowOut(BaseModel):
    n: int
    sup_err: float
    norm_errs: dict[str, float]
    pairing_errs: list[float]
    pairing_max_err: float
    abs_pairing_errs: list[float] | None = None
    abs_pairing_max_err: float | None = None


class ReplicateRequest(BaseModel):
    market: MarketIn
    target: str | list[float]
    n_max: int = Field(default=32, ge=1, le=200)
    norms: list[str] = ["Linf", "L1", "L2"]
    bank: str = "default"
    seed: int = 0
    include_absolute_pairing: bool = True


class ReplicateResponse(BaseModel):
    measurable: bool
    portfolio: PortfolioOut
    certificate: CertificatePairOut | None = None
    projection: list[float] | None = None
    rows: list[ReportRowOut]
    converged: dict[str, bool]
    report_csv: str
    seed: int
    tool_version: str
    tolerances: dict[str, float]


class DensityOut(BaseModel):
    weights: list[float]
    strict: bool


class FreeLunchOut(BaseModel):
    portfolio: PortfolioOut
    price: float
    claim: list[float]
    slack: list[float]
    kind: str


class PriceRequest(BaseModel):
    market: MarketIn
    pricing: PricingIn
    claim: str | list[float]
    delta: float | None = None


class PriceResponse(BaseModel):
    status: str  # "unique" | "non_unique" | "free_lunch"
    p_min: float | None = None
    p_max: float | None = None
    unique: bool | None = None
    scale: float | None = None
    delta: float | None = None
    delta_p_min: float | None = None
    delta_p_max: float | None = None
    lower_certificate: DensityOut | None = None
    upper_certificate: DensityOut | None = None
    witness: DensityOut | None = None
    witness_price: float | None = None
    margin: float | None = None
    lp_status: str | None = None
    free_lunch: FreeLunchOut | None = None
    tool_version: str
    tolerances: dict[str, float]


class VerifyRequest(BaseModel):
    market: MarketIn
    lemma: str
    seed: int = 0
    trials: int = Field(default=100, ge=1, le=100_000)
    strikes: list[float] | None = None
    mutate: bool = False


class VerifyResponse(BaseModel):
    lemma: str
    trials: int
    passed: bool
    counterexample: dict | None = None
    witnesses: list
    seed: int
    tool_version: str


class NormRequest(BaseModel):
    market: MarketIn
    claim: str | list[float]
    specs: list[str] = ["L1", "L2", "Linf"]


class NormResponse(BaseModel):
    values: dict[str, float]
    tool_version: str


class HealthOut(BaseModel):
    status: str
    version: str
