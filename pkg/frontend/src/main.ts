import { ApiClient } from './api';
import { canvasToImage, fitTransform, type CanvasTransform } from './coords';
import { debounce } from './debounce';
import {
  acknowledgeSubmit,
  clearStaged,
  initialState,
  isStaleFrame,
  stageClick,
  toggleOverlay,
  withGeneration,
  withScale,
} from './state';
import type { ClickSign, Meta, ViewState } from './types';
import { CanvasView, decodeFrame } from './view';

const api = new ApiClient('');

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const canvas = el<HTMLCanvasElement>('view');
const slider = el<HTMLInputElement>('scale');
const scaleReadout = el<HTMLSpanElement>('scale-readout');
const overlayToggle = el<HTMLInputElement>('overlay-toggle');
const signButtons = {
  '+': el<HTMLButtonElement>('tool-positive'),
  '-': el<HTMLButtonElement>('tool-negative'),
};
const strengthInput = el<HTMLInputElement>('strength');
const applyButton = el<HTMLButtonElement>('apply');
const resetButton = el<HTMLButtonElement>('reset');
const zoomInButton = el<HTMLButtonElement>('zoom-in');
const zoomOutButton = el<HTMLButtonElement>('zoom-out');
const statusLine = el<HTMLSpanElement>('status');
const errorBanner = el<HTMLDivElement>('error-banner');

let meta: Meta;
let state: ViewState;
let zoom = 1.0;
let tool: ClickSign = '+';
let fetchSeq = 0;
const view = new CanvasView(canvas);

function transform(): CanvasTransform {
  const fit = fitTransform(meta.width, meta.height, canvas.width, canvas.height);
  const scale = fit.scale * zoom;
  return {
    scale,
    offsetX: (canvas.width - meta.width * scale) / 2,
    offsetY: (canvas.height - meta.height * scale) / 2,
  };
}

function showError(message: string): void {
  errorBanner.textContent = message;
  errorBanner.hidden = false;
}

function clearError(): void {
  errorBanner.hidden = true;
}

function updateStatus(): void {
  statusLine.textContent =
    `K = ${state.k} / ${state.kMax} · generation ${state.generation}` +
    (state.pendingClicks.length
      ? ` · ${state.pendingClicks.length} staged click(s)`
      : '');
  scaleReadout.textContent = String(state.k);
  applyButton.disabled = state.pendingClicks.length === 0;
}

function redraw(): void {
  view.render(transform(), state.pendingClicks);
  updateStatus();
}

/** Fetch the frame for the current (k, overlay) pair; superseded responses
 * and stale generations are dropped or retried, never mixed in. */
async function refreshFrame(retry = true): Promise<void> {
  const token = ++fetchSeq;
  try {
    if (state.overlayVisible) {
      const frame = await api.overlay(state.k);
      if (token !== fetchSeq) return; // a newer request took over
      if (isStaleFrame(state, frame.generation)) {
        state = withGeneration(state, frame.generation);
        if (retry) return refreshFrame(false);
      }
      view.setFrame(await decodeFrame(frame.bytes));
    } else {
      const resp = await fetch(api.imageUrl());
      if (token !== fetchSeq) return;
      view.setFrame(await decodeFrame(await resp.arrayBuffer()));
    }
    clearError();
    redraw();
  } catch (err) {
    showError(`frame fetch failed: ${(err as Error).message}`);
  }
}

const debouncedRefresh = debounce(() => void refreshFrame(), 150);

function selectTool(sign: ClickSign): void {
  tool = sign;
  signButtons['+'].classList.toggle('active', sign === '+');
  signButtons['-'].classList.toggle('active', sign === '-');
}

function wireEvents(): void {
  slider.addEventListener('input', () => {
    state = withScale(state, Number(slider.value));
    updateStatus();
    debouncedRefresh();
  });

  overlayToggle.addEventListener('change', () => {
    state = toggleOverlay(state);
    void refreshFrame();
  });

  canvas.addEventListener('click', (event) => {
    const rect = canvas.getBoundingClientRect();
    const pos = {
      x: ((event.clientX - rect.left) * canvas.width) / rect.width,
      y: ((event.clientY - rect.top) * canvas.height) / rect.height,
    };
    const pixel = canvasToImage(pos, transform(), meta.width, meta.height);
    if (!pixel) return;
    const strength = Math.max(Number(strengthInput.value) || 1, 0.01);
    state = stageClick(state, pixel.x, pixel.y, tool, strength);
    redraw();
  });

  signButtons['+'].addEventListener('click', () => selectTool('+'));
  signButtons['-'].addEventListener('click', () => selectTool('-'));

  applyButton.addEventListener('click', () => {
    if (!state.pendingClicks.length) return;
    applyButton.disabled = true;
    api
      .submitClicks(state.pendingClicks)
      .then((generation) => {
        state = acknowledgeSubmit(state, generation);
        clearError();
        return refreshFrame();
      })
      .catch((err) => {
        // clicks stay staged so apply can be retried
        showError(`apply failed: ${(err as Error).message}`);
        applyButton.disabled = false;
      });
  });

  resetButton.addEventListener('click', () => {
    api
      .clearClicks()
      .then((generation) => {
        state = withGeneration(clearStaged(state), generation);
        return refreshFrame();
      })
      .catch((err) => showError(`reset failed: ${(err as Error).message}`));
  });

  zoomInButton.addEventListener('click', () => {
    zoom = Math.min(zoom * 2, 8);
    redraw();
  });
  zoomOutButton.addEventListener('click', () => {
    zoom = Math.max(zoom / 2, 0.25);
    redraw();
  });
}

async function start(): Promise<void> {
  meta = await api.meta();
  state = initialState(meta);
  slider.min = '1';
  slider.max = String(state.kMax);
  slider.value = String(state.k);
  selectTool('+');
  wireEvents();
  await refreshFrame();
}

start().catch((err) => showError(`startup failed: ${(err as Error).message}`));
