"""FastAPI service wrapping the core package."""

from .api import app, create_app, run_norms, run_price, run_replicate, run_verify
from .schemas import (
    NormRequest,
    NormResponse,
    PriceRequest,
    PriceResponse,
    ReplicateRequest,
    ReplicateResponse,
    VerifyRequest,
    VerifyResponse,
)

__all__ = [
    "app",
    "create_app",
    "run_norms",
    "run_price",
    "run_replicate",
    "run_verify",
    "NormRequest",
    "NormResponse",
    "PriceRequest",
    "PriceResponse",
    "ReplicateRequest",
    "ReplicateResponse",
    "VerifyRequest",
    "VerifyResponse",
]
