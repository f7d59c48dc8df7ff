"""String mini-languages for claims and density banks.

Claim specs name payoffs as functions of the underlying ("square",
"abs-dev:1.5", "indicator:0.5", "identity", "one") or give raw vectors,
either inline ("0,1,4" or "[0, 1, 4]") or in a JSON file referenced with an
"@" prefix.  Bank specs select the default seeded bank, the single constant
density, or a JSON file of weight vectors.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np

from .market import Claim, FiniteMarket, check_claim
from .norms import PairingBank, StatePriceDensity, default_bank


def parse_claim_spec(spec, market: FiniteMarket) -> Claim:
    if isinstance(spec, Claim):
        check_claim(spec, market)
        return spec
    if isinstance(spec, (list, tuple, np.ndarray)):
        claim = Claim(np.asarray(spec, dtype=float))
        check_claim(claim, market)
        return claim
    if not isinstance(spec, str):
        raise ValueError(f"cannot interpret claim spec {spec!r}")
    s = spec.strip()
    f = market.underlying
    if s.startswith("@"):
        data = json.loads(Path(s[1:]).read_text())
        if isinstance(data, dict):
            data = data["payoffs"]
        claim = Claim(np.asarray(data, dtype=float))
        check_claim(claim, market)
        return claim
    low = s.lower()
    if low == "square":
        return Claim(f * f)
    if low == "identity":
        return Claim(f.copy())
    if low in ("one", "1", "\N{MATHEMATICAL DOUBLE-STRUCK DIGIT ONE}"):
        return market.ones()
    if low.startswith("abs-dev:"):
        center = float(s.split(":", 1)[1])
        return Claim(np.abs(f - center))
    if low.startswith("indicator:"):
        r = float(s.split(":", 1)[1])
        return Claim((f > r).astype(float))
    if s.startswith("["):
        claim = Claim(np.asarray(json.loads(s), dtype=float))
        check_claim(claim, market)
        return claim
    if "," in s:
        claim = Claim(np.array([float(tok) for tok in s.split(",")]))
        check_claim(claim, market)
        return claim
    raise ValueError(
        f"unknown claim spec {spec!r}; use square, identity, one, abs-dev:c, "
        "indicator:r, a comma-separated vector, a JSON list, or @file"
    )


def parse_bank_spec(spec: str, market: FiniteMarket, seed: int = 0) -> PairingBank:
    s = spec.strip()
    if s == "default":
        return default_bank(market, seed)
    if s == "ones":
        return PairingBank((StatePriceDensity(np.ones(market.n_states)),))
    if s.startswith("@"):
        data = json.loads(Path(s[1:]).read_text())
        if isinstance(data, dict):
            data = data["densities"]
        return PairingBank(
            tuple(StatePriceDensity(np.asarray(w, dtype=float)) for w in data)
        )
    raise ValueError(f"unknown bank spec {spec!r}; use default, ones, or @file")


def parse_strike_list(text: str | Sequence[float]) -> list[float]:
    if isinstance(text, str):
        return [float(tok) for tok in text.split(",") if tok.strip()]
    return [float(v) for v in text]
