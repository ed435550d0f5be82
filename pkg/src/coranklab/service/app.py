"""FastAPI service wrapping the lab: one POST endpoint per operation.

Error mapping (mirrored by the CLI's exit codes): precondition failures
give 400, enumeration-budget refusals give 409, and internal invariant
violations give 500 with an explicit marker body.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import anticoncentration as ac
from .. import experiments as ex
from .. import geometry as geo
from .. import matrix as mx
from .. import rinv as ri
from .. import theta as th
from ..config import parse_probability
from ..errors import InputError, InvariantViolation, ResourceRefusal
from ..records import TOOL_VERSION, to_jsonable
from ..rng import GENERATOR_VERSION
from .models import (
    BoundsRequest,
    BracketRequest,
    ClassifyRequest,
    EnumerateRequest,
    FixedVectorRequest,
    LevyRequest,
    LkrRequest,
    McRequest,
    RankRequest,
    RinvRequest,
    ThetaRequest,
    ThresholdRequest,
)


def create_app() -> FastAPI:
    app = FastAPI(title="coranklab", version=TOOL_VERSION)

    @app.exception_handler(InputError)
    async def _input_error(request: Request, exc: InputError):
        return JSONResponse(status_code=400, content={"error": "invalid-input", "detail": str(exc)})

    @app.exception_handler(ResourceRefusal)
    async def _refusal(request: Request, exc: ResourceRefusal):
        return JSONResponse(status_code=409, content={"error": "resource-refusal", "detail": str(exc)})

    @app.exception_handler(InvariantViolation)
    async def _invariant(request: Request, exc: InvariantViolation):
        return JSONResponse(
            status_code=500, content={"error": "invariant-violation", "detail": str(exc)}
        )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/version")
    def version():
        return {"tool_version": TOOL_VERSION, "generator_version": GENERATOR_VERSION}

    @app.post("/rank")
    def rank(req: RankRequest):
        m = mx.from_text(req.matrix)
        if req.method == "rational":
            res = mx.rank_rational(m)
        elif req.method == "modular":
            if req.prime is None:
                raise InputError("modular rank needs a prime")
            res = mx.rank_mod_prime(m, req.prime)
        else:
            raise InputError(f"unknown rank method {req.method!r}")
        return {"record": "rank", **to_jsonable(res), "rows": m.rows, "cols": m.cols}

    @app.post("/levy")
    def levy(req: LevyRequest):
        p = parse_probability(req.p)
        d = ac.build_distribution(req.weights, p)
        value = ac.scalar_levy(d, req.r)
        return {
            "record": "levy",
            "value": to_jsonable(value),
            "value_float": float(value),
            "p": to_jsonable(p),
            "r": req.r,
            "n": len(req.weights),
            "atoms": len(d.values),
            "method": "sliding-window",
        }

    @app.post("/threshold")
    def threshold(req: ThresholdRequest):
        p = parse_probability(req.p)
        value = ac.threshold(req.weights, p, req.L)
        return {
            "record": "threshold",
            "value": value,
            "p": to_jsonable(p),
            "L": req.L,
            "n": len(req.weights),
            "method": "breakpoint-scan",
        }

    @app.post("/levy-bracket")
    def levy_bracket(req: BracketRequest):
        p = parse_probability(req.p)
        lower, upper = ac.vector_levy_bracket(np.array(req.rows), p, req.r)
        return {
            "record": "levy-bracket",
            "lower": to_jsonable(lower),
            "upper": to_jsonable(upper),
            "p": to_jsonable(p),
            "r": req.r,
        }

    @app.post("/lkr")
    def lkr(req: LkrRequest):
        p = parse_probability(req.p)
        chk = ac.lkr_bound_check(req.weights, p, req.r_i, req.r, req.C)
        return {"record": "lkr-check", **to_jsonable(chk), "p": to_jsonable(p)}

    @app.post("/theta")
    def theta(req: ThetaRequest):
        p = parse_probability(req.p)
        m = np.array(req.rows, dtype=float)
        cert = th.compute_theta(m, p, req.C)
        payload = {"record": "theta-certificate", **to_jsonable(cert)}
        if req.verify:
            ver = th.verify_theta(cert, m, p)
            payload["verification"] = to_jsonable(ver)
        return payload

    @app.post("/rinv")
    def rinv(req: RinvRequest):
        sel = ri.select_columns(np.array(req.rows, dtype=float), req.mode)
        return {"record": "column-selection", **to_jsonable(sel)}

    @app.post("/classify")
    def classify(req: ClassifyRequest):
        res = geo.classify_vector(np.array(req.vector, dtype=float), req.delta, req.rho)
        return {"record": "classification", **to_jsonable(res)}

    @app.post("/enumerate")
    def enumerate_(req: EnumerateRequest):
        p = parse_probability(req.p)
        dist = ex.enumerate_corank(req.n, p)
        at_least = {k: dist.prob_at_least(k) for k in range(1, req.n + 1)}
        return {
            "record": "corank-distribution",
            **to_jsonable(dist),
            "prob_at_least": to_jsonable(at_least),
        }

    @app.post("/mc")
    def mc(req: McRequest):
        p = parse_probability(req.p)
        rec = ex.mc_corank(req.n, p, req.k, req.trials, req.seed)
        return {"record": "estimate", "event": "corank_at_least", **to_jsonable(rec)}

    @app.post("/bounds")
    def bounds(req: BoundsRequest):
        p = parse_probability(req.p)
        eps = parse_probability(req.epsilon) if req.epsilon != 0 else Fraction(0)
        rows = ex.bound_table(req.n_values, p, req.k, eps)
        return {"record": "bound-table", "rows": [to_jsonable(r) for r in rows]}

    @app.post("/fixed-vector")
    def fixed_vector(req: FixedVectorRequest):
        p = parse_probability(req.p)
        rec = ex.fixed_vector_event_mc(
            np.array(req.v_columns, dtype=float), p, req.c, req.trials, req.seed
        )
        return {"record": "estimate", "event": "hs_norm_below", "c": req.c, **to_jsonable(rec)}

    return app


app = create_app()

__all__ = ["app", "create_app"]
