/**
 * View-state transitions. Pure functions over ViewState so the click
 * staging / apply / generation rules are testable without a DOM.
 */

import type { ClickSign, Meta, StagedClick, ViewState } from './types';

export function initialState(meta: Meta): ViewState {
  return {
    k: meta.k_max,
    kMax: meta.k_max,
    overlayVisible: true,
    pendingClicks: [],
    generation: meta.generation,
  };
}

/** Scales outside [1, kMax] clamp to the nearest bound. */
export function clampScale(state: ViewState, k: number): number {
  return Math.min(Math.max(Math.round(k), 1), state.kMax);
}

export function withScale(state: ViewState, k: number): ViewState {
  return { ...state, k: clampScale(state, k) };
}

export function toggleOverlay(state: ViewState): ViewState {
  return { ...state, overlayVisible: !state.overlayVisible };
}

export function stageClick(
  state: ViewState,
  x: number,
  y: number,
  sign: ClickSign,
  strength = 1.0,
): ViewState {
  const click: StagedClick = { x, y, sign, strength };
  return { ...state, pendingClicks: [...state.pendingClicks, click] };
}

export function clearStaged(state: ViewState): ViewState {
  return { ...state, pendingClicks: [] };
}

/** After a successful POST: pending clicks are applied, generation moves. */
export function acknowledgeSubmit(state: ViewState, generation: number): ViewState {
  return { ...state, pendingClicks: [], generation };
}

export function withGeneration(state: ViewState, generation: number): ViewState {
  return { ...state, generation };
}

/**
 * A frame stamped with a generation other than the one we track is stale:
 * the hierarchy changed under us and the view must refetch.
 */
export function isStaleFrame(state: ViewState, frameGeneration: number): boolean {
  return frameGeneration !== state.generation;
}
