"""FastAPI application exposing one interactive session.

Endpoints (JSON unless noted):

- GET  /api/meta                -> width, height, n_f, k_max, generation, params
- GET  /api/image               -> RGB PNG
- GET  /api/partition?k=K       -> 16-bit label PNG with exactly K regions
- GET  /api/overlay?k=K         -> RGB PNG with region boundaries painted
- GET  /api/attention           -> 16-bit PNG of the effective attention map
- POST /api/clicks              <- click array; appends, rebuilds, returns generation
- DELETE /api/clicks            -> clears clicks, rebuilds, returns generation
- POST /api/params              <- parameter patch; rebuilds, returns generation
- GET  /api/metrics?k=K         -> metrics report (needs ground truth at startup)

Image responses carry an X-Generation header so clients can detect stale
frames. Static UI assets, when provided, are served at /.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.responses import HTMLResponse
from fastapi.staticfiles import StaticFiles

from ..imgio import Click, encode_attention_png, encode_image_png, encode_label_map_png
from ..metrics import evaluate, render_overlay
from .schemas import ClickIn, GenerationOut, MetaOut, MetricsOut, ParamsIn, ParamsOut
from .session import Session

_FALLBACK_INDEX = """<!doctype html>
<html><head><title>hierpix</title></head>
<body><h1>hierpix service</h1>
<p>The interactive UI assets are not bundled. The JSON/PNG API is live under
<code>/api/</code>; see <code>/docs</code> for the schema.</p>
</body></html>
"""


def create_app(session: Session, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="hierpix", version="0.1.0")

    def _checked_k(k: int) -> int:
        if not 1 <= k <= session.n_f:
            raise HTTPException(
                status_code=400, detail=f"k must be in [1, {session.n_f}]"
            )
        return k

    @app.get("/api/meta", response_model=MetaOut)
    def meta() -> MetaOut:
        snap = session.snapshot
        return MetaOut(
            width=session.inputs.width,
            height=session.inputs.height,
            n_f=snap.seq.n_f,
            k_max=snap.seq.n_f,
            generation=snap.generation,
            params=ParamsOut(
                w_pos=snap.params.w_pos,
                w_att=snap.params.w_att,
                attention_mode=snap.params.attention_mode,
            ),
        )

    @app.get("/api/image")
    def image() -> Response:
        return Response(
            content=encode_image_png(session.inputs.image), media_type="image/png"
        )

    @app.get("/api/partition")
    def partition(k: int = Query(...)) -> Response:
        snap = session.snapshot
        labels = session.partition(_checked_k(k), snap)
        return Response(
            content=encode_label_map_png(labels),
            media_type="image/png",
            headers={"X-Generation": str(snap.generation)},
        )

    @app.get("/api/overlay")
    def overlay(k: int = Query(...)) -> Response:
        snap = session.snapshot
        labels = session.partition(_checked_k(k), snap)
        painted = render_overlay(session.inputs.image, labels)
        return Response(
            content=encode_image_png(painted),
            media_type="image/png",
            headers={"X-Generation": str(snap.generation)},
        )

    @app.get("/api/attention")
    def attention() -> Response:
        snap = session.snapshot
        att = snap.attention
        if att is None:
            att = np.zeros((session.inputs.height, session.inputs.width))
        return Response(
            content=encode_attention_png(att),
            media_type="image/png",
            headers={"X-Generation": str(snap.generation)},
        )

    @app.post("/api/clicks", response_model=GenerationOut)
    def post_clicks(clicks: list[ClickIn]) -> GenerationOut:
        parsed = [
            Click(x=c.x, y=c.y, sign=1 if c.sign == "+" else -1, strength=c.strength)
            for c in clicks
        ]
        try:
            generation = session.add_clicks(parsed)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return GenerationOut(generation=generation)

    @app.delete("/api/clicks", response_model=GenerationOut)
    def delete_clicks() -> GenerationOut:
        return GenerationOut(generation=session.clear_clicks())

    @app.post("/api/params", response_model=GenerationOut)
    def post_params(params: ParamsIn) -> GenerationOut:
        try:
            generation = session.set_params(
                w_pos=params.w_pos,
                w_att=params.w_att,
                attention_mode=params.attention_mode,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return GenerationOut(generation=generation)

    @app.get("/api/metrics", response_model=MetricsOut)
    def metrics(k: int = Query(...)) -> MetricsOut:
        gts = session.inputs.ground_truths
        if not gts:
            raise HTTPException(
                status_code=404, detail="no ground truth supplied at startup"
            )
        labels = session.partition(_checked_k(k))
        report = evaluate(labels, list(gts))
        return MetricsOut(**report.to_dict())

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    else:

        @app.get("/", response_class=HTMLResponse)
        def index() -> str:
            return _FALLBACK_INDEX

    return app
