export type ClickSign = '+' | '-';

/** A click staged locally, in image pixel coordinates. */
export interface StagedClick {
  x: number;
  y: number;
  sign: ClickSign;
  strength: number;
}

export interface SessionParams {
  w_pos: number;
  w_att: number;
  attention_mode: string;
}

/** Response of GET /api/meta. */
export interface Meta {
  width: number;
  height: number;
  n_f: number;
  k_max: number;
  generation: number;
  params: SessionParams;
}

/** Client view state; see state.ts for the transition rules. */
export interface ViewState {
  k: number;
  kMax: number;
  overlayVisible: boolean;
  pendingClicks: StagedClick[];
  generation: number;
}
