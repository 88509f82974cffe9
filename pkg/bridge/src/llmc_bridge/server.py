"""JSON-over-HTTP serving of next-token distributions.

POST /v1/distribution -> {tokens, covered_mass, model_id, vocab_size}
GET  /v1/health       -> {model_id, vocab_size}

Distributions are truncated to top_n with honest covered_mass; the tail
is never renormalized.  Inference runs under a lock (one model instance,
sequential requests).
"""

from __future__ import annotations

import math
import threading

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .backends import ContextTooLong, ModelBackend, softmax


class DistributionRequest(BaseModel):
    context: str
    top_n: int = Field(ge=1)
    temperature: float = Field(default=1.0, gt=0)


class TokenEntry(BaseModel):
    id: int
    text: str
    prob: float


class DistributionResponse(BaseModel):
    tokens: list[TokenEntry]
    covered_mass: float
    model_id: str
    vocab_size: int


def compute_distribution(backend: ModelBackend, req: DistributionRequest) -> DistributionResponse:
    logits = backend.next_token_logits(req.context)
    probs = softmax(logits, req.temperature)
    order = sorted(range(len(probs)), key=lambda i: (-probs[i], i))[: req.top_n]
    tokens = [TokenEntry(id=i, text=backend.vocab[i], prob=probs[i]) for i in order]
    return DistributionResponse(
        tokens=tokens,
        covered_mass=math.fsum(t.prob for t in tokens),
        model_id=backend.model_id,
        vocab_size=len(backend.vocab),
    )


def create_app(backend: ModelBackend | None = None, loader=None) -> FastAPI:
    """Serve `backend`, or load one via `loader()` in the background.

    Requests arriving before the loader finishes get 503.
    """
    app = FastAPI(title="llmc-bridge")
    state = {"backend": backend}
    lock = threading.Lock()

    if backend is None:
        if loader is None:
            raise ValueError("need a backend or a loader")

        def _load():
            state["backend"] = loader()

        threading.Thread(target=_load, daemon=True).start()

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.get("/v1/health")
    def health():
        b = state["backend"]
        if b is None:
            return JSONResponse(status_code=503, content={"detail": "model loading"})
        return {"model_id": b.model_id, "vocab_size": len(b.vocab)}

    @app.post("/v1/distribution")
    def distribution(req: DistributionRequest):
        b = state["backend"]
        if b is None:
            return JSONResponse(status_code=503, content={"detail": "model loading"})
        try:
            with lock:
                return compute_distribution(b, req)
        except ContextTooLong as exc:
            return JSONResponse(status_code=413, content={"detail": str(exc)})

    return app


def serve(model_id: str | None, host: str = "127.0.0.1", port: int = 8977) -> None:
    import uvicorn

    def loader():
        if model_id is None:
            from .backends import StubBackend

            return StubBackend()
        from .backends import HFBackend

        return HFBackend(model_id)

    uvicorn.run(create_app(loader=loader), host=host, port=port)


def main(argv=None) -> int:
    import argparse

    parser = argparse.ArgumentParser(prog="llmc-bridge")
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--model", help="Hugging Face model identifier")
    group.add_argument(
        "--stub", action="store_true",
        help="serve the deterministic stub backend (no model download)",
    )
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8977)
    args = parser.parse_args(argv)
    serve(None if args.stub else args.model, args.host, args.port)
    return 0
