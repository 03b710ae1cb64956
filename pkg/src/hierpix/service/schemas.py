"""Request/response models for the HTTP API."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class ClickIn(BaseModel):
    x: int
    y: int
    sign: Literal["+", "-"] = "+"
    strength: float = Field(default=1.0, gt=0)


class ParamsIn(BaseModel):
    w_pos: float | None = Field(default=None, ge=0)
    w_att: float | None = Field(default=None, ge=0)
    attention_mode: Literal["off", "superpixel", "object"] | None = None


class ParamsOut(BaseModel):
    w_pos: float
    w_att: float
    attention_mode: str


class MetaOut(BaseModel):
    width: int
    height: int
    n_f: int
    k_max: int
    generation: int
    params: ParamsOut


class GenerationOut(BaseModel):
    generation: int


class MetricsOut(BaseModel):
    k: int
    asa: float
    br: float
    cd: float
    src: float
    eps: int
    nestedness: float | None = None
