"""FastAPI application exposing /v1/embed, /v1/sentiment, /v1/info, /healthz."""

from __future__ import annotations

import argparse
import json
import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from . import __version__
from .backends import ModelNotLoaded, build_embedder, build_sentiment

MAX_BATCH = 256
MAX_CHARS = 2048

# Offline-capable defaults; deployments point the transformer types at real
# checkpoints (sakil stays a PromCSE-derivative by configuration).
DEFAULT_CONFIG = {
    "models": {
        "sakil": {"type": "hash", "dim": 768, "key": "svc.sakil"},
        "promcse": {"type": "hash", "dim": 384, "key": "svc.promcse"},
        "sbert": {"type": "hash", "dim": 384, "key": "svc.sbert"},
    },
    "sentiment": {"type": "lexicon"},
}


class EmbedRequest(BaseModel):
    model: str
    sentences: list[str]


class SentimentRequest(BaseModel):
    texts: list[str]


def _check_batch(items: list[str]):
    if not items:
        raise HTTPException(400, "batch must hold at least one text")
    if len(items) > MAX_BATCH:
        raise HTTPException(413, f"batch larger than {MAX_BATCH}")
    for t in items:
        if not t or not t.strip():
            raise HTTPException(400, "batch contains an empty text")
        if len(t) > MAX_CHARS:
            raise HTTPException(400, f"text longer than {MAX_CHARS} characters")


def load_service_config(path: str | None) -> dict:
    if path is None:
        return json.loads(json.dumps(DEFAULT_CONFIG))
    return json.loads(Path(path).read_text(encoding="utf-8"))


def create_app(config: dict | None = None) -> FastAPI:
    config = config or load_service_config(None)
    app = FastAPI(title="model-service", version=__version__)

    embedders = {}
    declared_dims = {}
    locks = {}
    for model_id, spec in config["models"].items():
        embedders[model_id], declared_dims[model_id] = build_embedder(spec)
        locks[model_id] = threading.Lock()
    sentiment = build_sentiment(config["sentiment"])
    sentiment_lock = threading.Lock()

    def dim_of(model_id: str) -> int:
        d = declared_dims[model_id]
        if d is None:
            d = embedders[model_id].dim
            declared_dims[model_id] = d
        return d

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/v1/info")
    def info():
        models = {}
        for model_id, spec in config["models"].items():
            try:
                models[model_id] = {
                    "checkpoint": spec.get("checkpoint", f"builtin:{spec['type']}"),
                    "dim": dim_of(model_id),
                }
            except ModelNotLoaded as e:
                raise HTTPException(503, str(e))
        return {"models": models, "version": __version__}

    @app.post("/v1/embed")
    def embed(req: EmbedRequest):
        if req.model not in embedders:
            raise HTTPException(400, f"unknown model {req.model!r}")
        _check_batch(req.sentences)
        try:
            with locks[req.model]:  # inference serialized per model
                vectors = embedders[req.model].embed(req.sentences)
            return {"dim": dim_of(req.model), "vectors": vectors}
        except ModelNotLoaded as e:
            raise HTTPException(503, str(e))

    @app.post("/v1/sentiment")
    def sentiment_endpoint(req: SentimentRequest):
        _check_batch(req.texts)
        try:
            with sentiment_lock:
                labels, confidences = sentiment.score(req.texts)
            return {"labels": labels, "confidences": confidences}
        except ModelNotLoaded as e:
            raise HTTPException(503, str(e))

    return app


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="model-service")
    parser.add_argument("--config", default=None, help="JSON checkpoint config")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8077)
    args = parser.parse_args(argv)

    import uvicorn
    app = create_app(load_service_config(args.config))
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
