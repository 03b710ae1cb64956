/**
 * Typed client for the hierarchy service API.
 *
 * Image-bearing responses return raw PNG bytes plus the generation the
 * server stamped on them (X-Generation header), so callers can discard
 * frames from a superseded hierarchy.
 */

import type { Meta, SessionParams, StagedClick } from './types';

export interface PngResponse {
  bytes: ArrayBuffer;
  generation: number;
}

async function expectOk(resp: Response): Promise<Response> {
  if (!resp.ok) {
    let detail = `${resp.status}`;
    try {
      const body = await resp.json();
      if (body && typeof body.detail === 'string') detail = body.detail;
    } catch {
      // non-JSON error body; keep the status code
    }
    throw new Error(`request failed: ${detail}`);
  }
  return resp;
}

export class ApiClient {
  constructor(private readonly baseUrl: string = '') {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async meta(): Promise<Meta> {
    const resp = await expectOk(await fetch(this.url('/api/meta')));
    return (await resp.json()) as Meta;
  }

  imageUrl(): string {
    return this.url('/api/image');
  }

  private async png(path: string): Promise<PngResponse> {
    const resp = await expectOk(await fetch(this.url(path)));
    const generation = Number(resp.headers.get('X-Generation') ?? '-1');
    return { bytes: await resp.arrayBuffer(), generation };
  }

  overlay(k: number): Promise<PngResponse> {
    return this.png(`/api/overlay?k=${k}`);
  }

  partition(k: number): Promise<PngResponse> {
    return this.png(`/api/partition?k=${k}`);
  }

  attention(): Promise<PngResponse> {
    return this.png('/api/attention');
  }

  /** Apply staged clicks; resolves to the new server generation. */
  async submitClicks(clicks: StagedClick[]): Promise<number> {
    const resp = await expectOk(
      await fetch(this.url('/api/clicks'), {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify(clicks),
      }),
    );
    return ((await resp.json()) as { generation: number }).generation;
  }

  async clearClicks(): Promise<number> {
    const resp = await expectOk(
      await fetch(this.url('/api/clicks'), { method: 'DELETE' }),
    );
    return ((await resp.json()) as { generation: number }).generation;
  }

  async setParams(params: Partial<SessionParams>): Promise<number> {
    const resp = await expectOk(
      await fetch(this.url('/api/params'), {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify(params),
      }),
    );
    return ((await resp.json()) as { generation: number }).generation;
  }
}
