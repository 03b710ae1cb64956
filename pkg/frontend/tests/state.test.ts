import { describe, expect, it } from 'vitest';

import {
  acknowledgeSubmit,
  clampScale,
  clearStaged,
  initialState,
  isStaleFrame,
  stageClick,
  toggleOverlay,
  withScale,
} from '../src/state';
import type { Meta } from '../src/types';

const meta: Meta = {
  width: 64,
  height: 64,
  n_f: 64,
  k_max: 64,
  generation: 0,
  params: { w_pos: 5, w_att: 0.5, attention_mode: 'object' },
};

describe('view state', () => {
  it('starts at the finest scale with no staged clicks', () => {
    const state = initialState(meta);
    expect(state.k).toBe(64);
    expect(state.pendingClicks).toHaveLength(0);
    expect(state.overlayVisible).toBe(true);
    expect(state.generation).toBe(0);
  });

  it('clamps out-of-range scales to the bounds', () => {
    const state = initialState(meta);
    expect(clampScale(state, 0)).toBe(1);
    expect(clampScale(state, -5)).toBe(1);
    expect(clampScale(state, 9000)).toBe(64);
    expect(clampScale(state, 12.6)).toBe(13);
    expect(withScale(state, 0).k).toBe(1);
  });

  it('stages clicks immutably in order', () => {
    const s0 = initialState(meta);
    const s1 = stageClick(s0, 3, 4, '+');
    const s2 = stageClick(s1, 5, 6, '-', 2.0);
    expect(s0.pendingClicks).toHaveLength(0);
    expect(s2.pendingClicks).toEqual([
      { x: 3, y: 4, sign: '+', strength: 1.0 },
      { x: 5, y: 6, sign: '-', strength: 2.0 },
    ]);
  });

  it('clears pending clicks after a successful submit', () => {
    let state = stageClick(initialState(meta), 1, 1, '+');
    state = acknowledgeSubmit(state, 7);
    expect(state.pendingClicks).toHaveLength(0);
    expect(state.generation).toBe(7);
  });

  it('clearStaged drops clicks without touching the generation', () => {
    const state = clearStaged(stageClick(initialState(meta), 1, 1, '+'));
    expect(state.pendingClicks).toHaveLength(0);
    expect(state.generation).toBe(0);
  });

  it('flags frames from another generation as stale', () => {
    const state = acknowledgeSubmit(initialState(meta), 3);
    expect(isStaleFrame(state, 3)).toBe(false);
    expect(isStaleFrame(state, 2)).toBe(true);
    expect(isStaleFrame(state, 4)).toBe(true);
  });

  it('toggles overlay visibility', () => {
    const state = toggleOverlay(initialState(meta));
    expect(state.overlayVisible).toBe(false);
    expect(toggleOverlay(state).overlayVisible).toBe(true);
  });
});
