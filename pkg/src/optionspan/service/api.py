"""Service handlers and the FastAPI application.

Each handler is a pure function from a request model to a response model;
the CLI calls them in process and the app exposes them over HTTP.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .._version import __version__
from ..errors import OptionSpanError
from ..lattice import (
    SublatticeSpec,
    verify_green_jarrow,
    verify_order_closed_iff_sequential,
)
from ..market import build_market, conditional_expectation, sigma_of
from ..norms import (
    convergence_report,
    norm as claim_norm,
    parse_norm_spec,
    verify_mode_agreement,
)
from ..options import is_in_span, payoff, portfolio_to_dict, z_identity_report
from ..pricing import PricingFunctional, no_free_lunch, price_bounds
from ..replication import exact_replicate, ladder_sequence
from ..specs import parse_bank_spec, parse_claim_spec
from .schemas import (
    CertificatePairOut,
    DensityOut,
    FreeLunchOut,
    HealthOut,
    LegOut,
    NormRequest,
    NormResponse,
    PortfolioOut,
    PriceRequest,
    PriceResponse,
    ReplicateRequest,
    ReplicateResponse,
    ReportRowOut,
    VerifyRequest,
    VerifyResponse,
)

TOLERANCES = {
    "converged": 1e-8,
    "reprice": 1e-8,
    "unique_rtol": 1e-8,
    "exact_replication": 1e-10,
}

VALID_LEMMAS = ("o-closed", "green-jarrow", "z-identity", "mode-agreement")

DEFAULT_Z_STRIKES = [-1.0, 0.0, 0.5, 1.0, 2.0]


def _portfolio_out(port) -> PortfolioOut:
    d = portfolio_to_dict(port)
    return PortfolioOut(cash=d["cash"], legs=[LegOut(**leg) for leg in d["legs"]])


def _density_out(density) -> DensityOut:
    return DensityOut(
        weights=[float(w) for w in density.weights], strict=density.strict
    )


def _report_rows(report) -> list[ReportRowOut]:
    rows = []
    for row in report.rows:
        rows.append(
            ReportRowOut(
                n=row.n,
                sup_err=row.sup_err,
                norm_errs=dict(row.norm_errs),
                pairing_errs=list(row.pairing_errs),
                pairing_max_err=row.pairing_max_err,
                abs_pairing_errs=(
                    None
                    if row.abs_pairing_errs is None
                    else list(row.abs_pairing_errs)
                ),
                abs_pairing_max_err=row.abs_pairing_max_err,
            )
        )
    return rows


def run_replicate(req: ReplicateRequest) -> ReplicateResponse:
    market = build_market(req.market.probs, req.market.underlying, req.market.labels)
    target = parse_claim_spec(req.target, market)
    norms = [parse_norm_spec(s) for s in req.norms]
    bank = parse_bank_spec(req.bank, market, req.seed)
    mem = is_in_span(target, market)
    steps = list(range(1, req.n_max + 1))
    certificate = None
    projection = None
    if mem.member:
        ladder_target = target
        portfolio = mem.portfolio
    else:
        proj = conditional_expectation(target, sigma_of(market), market)
        ladder_target = proj
        portfolio = exact_replicate(proj, market)
        projection = [float(v) for v in proj.payoffs]
        i, j = mem.certificate
        certificate = CertificatePairOut(
            state_i=int(i),
            state_j=int(j),
            cell=[int(s) for s in mem.cell],
            value_i=float(target.payoffs[i]),
            value_j=float(target.payoffs[j]),
        )
    ports = ladder_sequence(ladder_target, market, steps)
    seq = [payoff(p, market) for p in ports]
    report = convergence_report(
        seq,
        target,
        market,
        norms,
        bank,
        include_absolute=req.include_absolute_pairing,
        steps=steps,
        meta={"seed": req.seed, "bank": req.bank},
    )
    return ReplicateResponse(
        measurable=mem.member,
        portfolio=_portfolio_out(portfolio),
        certificate=certificate,
        projection=projection,
        rows=_report_rows(report),
        converged={k: bool(v) for k, v in report.converged.items()},
        report_csv=report.to_csv(),
        seed=req.seed,
        tool_version=__version__,
        tolerances=TOLERANCES,
    )


def run_price(req: PriceRequest) -> PriceResponse:
    market = build_market(req.market.probs, req.market.underlying, req.market.labels)
    pricing = PricingFunctional(
        req.pricing.bond, tuple((q.k, q.price) for q in req.pricing.calls)
    )
    claim = parse_claim_spec(req.claim, market)
    nfl = no_free_lunch(pricing, market)
    if not nfl.nfl:
        cert = nfl.certificate
        return PriceResponse(
            status="free_lunch",
            margin=nfl.margin,
            free_lunch=FreeLunchOut(
                portfolio=_portfolio_out(cert.portfolio),
                price=cert.price,
                claim=[float(v) for v in cert.claim.payoffs],
                slack=[float(v) for v in cert.slack.payoffs],
                kind=cert.kind,
            ),
            tool_version=__version__,
            tolerances=TOLERANCES,
        )
    bounds = price_bounds(claim, pricing, market, nfl=nfl, delta=req.delta)
    witness_price = nfl.scale * float(
        (claim.payoffs * nfl.witness.weights * market.probs).sum()
    )
    return PriceResponse(
        status="unique" if bounds.unique else "non_unique",
        p_min=bounds.p_min,
        p_max=bounds.p_max,
        unique=bounds.unique,
        scale=bounds.scale,
        delta=bounds.delta,
        delta_p_min=bounds.delta_p_min,
        delta_p_max=bounds.delta_p_max,
        lower_certificate=_density_out(bounds.lower_certificate),
        upper_certificate=_density_out(bounds.upper_certificate),
        witness=_density_out(nfl.witness),
        witness_price=witness_price,
        margin=nfl.margin,
        lp_status=bounds.lp_status,
        tool_version=__version__,
        tolerances=TOLERANCES,
    )


def run_verify(req: VerifyRequest) -> VerifyResponse:
    market = build_market(req.market.probs, req.market.underlying, req.market.labels)
    lemma = req.lemma.strip().lower()
    if lemma == "o-closed":
        spec = SublatticeSpec((market.ones(), market.underlying_claim()), market)
        rep = verify_order_closed_iff_sequential(
            spec, trials=req.trials, seed=req.seed, mutate=req.mutate
        )
    elif lemma == "green-jarrow":
        spec = SublatticeSpec((market.ones(), market.underlying_claim()), market)
        rep = verify_green_jarrow(
            spec, n_reconstruct=min(req.trials, 50), seed=req.seed
        )
    elif lemma == "z-identity":
        strikes = req.strikes if req.strikes is not None else DEFAULT_Z_STRIKES
        rep = z_identity_report(market, strikes)
        rep.seed = req.seed
    elif lemma == "mode-agreement":
        rep = verify_mode_agreement(market, trials=req.trials, seed=req.seed)
    else:
        raise ValueError(
            f"unknown lemma {req.lemma!r}; valid names: {', '.join(VALID_LEMMAS)}"
        )
    return VerifyResponse(
        lemma=rep.lemma,
        trials=rep.trials,
        passed=rep.passed,
        counterexample=rep.counterexample,
        witnesses=rep.witnesses,
        seed=req.seed,
        tool_version=__version__,
    )


def run_norms(req: NormRequest) -> NormResponse:
    market = build_market(req.market.probs, req.market.underlying, req.market.labels)
    claim = parse_claim_spec(req.claim, market)
    values = {}
    for text in req.specs:
        spec = parse_norm_spec(text)
        values[spec.name] = claim_norm(claim, market, spec)
    return NormResponse(values=values, tool_version=__version__)


def create_app() -> FastAPI:
    app = FastAPI(title="optionspan", version=__version__)

    @app.exception_handler(OptionSpanError)
    async def _domain_error(request, exc):
        return JSONResponse(
            status_code=400,
            content={"error": type(exc).__name__, "message": str(exc)},
        )

    @app.exception_handler(ValueError)
    async def _value_error(request, exc):
        return JSONResponse(
            status_code=400,
            content={"error": "ValueError", "message": str(exc)},
        )

    @app.get("/health", response_model=HealthOut)
    def health() -> HealthOut:
        return HealthOut(status="ok", version=__version__)

    @app.post("/replicate", response_model=ReplicateResponse)
    def replicate(req: ReplicateRequest) -> ReplicateResponse:
        return run_replicate(req)

    @app.post("/price", response_model=PriceResponse)
    def price(req: PriceRequest) -> PriceResponse:
        return run_price(req)

    @app.post("/verify", response_model=VerifyResponse)
    def verify(req: VerifyRequest) -> VerifyResponse:
        return run_verify(req)

    @app.post("/norms", response_model=NormResponse)
    def norms(req: NormRequest) -> NormResponse:
        return run_norms(req)

    return app


app = create_app()
