/**
 * Canvas rendering: the current frame bitmap plus staged click markers.
 * Positive clicks draw as white crosses, negative ones as red crosses.
 */

import type { CanvasTransform } from './coords';
import { imageToCanvas } from './coords';
import type { StagedClick } from './types';

const MARKER_RADIUS = 7;

export class CanvasView {
  private readonly ctx: CanvasRenderingContext2D;
  private bitmap: ImageBitmap | null = null;

  constructor(private readonly canvas: HTMLCanvasElement) {
    const ctx = canvas.getContext('2d');
    if (!ctx) throw new Error('2d canvas context unavailable');
    this.ctx = ctx;
    this.ctx.imageSmoothingEnabled = false;
  }

  /** Swap in a freshly decoded frame; the previous one stays until then. */
  setFrame(bitmap: ImageBitmap): void {
    this.bitmap?.close();
    this.bitmap = bitmap;
  }

  render(transform: CanvasTransform, clicks: StagedClick[]): void {
    const { ctx, canvas } = this;
    ctx.fillStyle = '#181818';
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    if (this.bitmap) {
      ctx.drawImage(
        this.bitmap,
        transform.offsetX,
        transform.offsetY,
        this.bitmap.width * transform.scale,
        this.bitmap.height * transform.scale,
      );
    }
    for (const click of clicks) {
      this.drawMarker(click, transform);
    }
  }

  private drawMarker(click: StagedClick, transform: CanvasTransform): void {
    const { ctx } = this;
    const pos = imageToCanvas({ x: click.x, y: click.y }, transform);
    ctx.save();
    ctx.lineWidth = 2.5;
    ctx.lineCap = 'round';
    ctx.strokeStyle = click.sign === '+' ? '#ffffff' : '#e03131';
    ctx.shadowColor = 'rgba(0, 0, 0, 0.6)';
    ctx.shadowBlur = 3;
    ctx.beginPath();
    if (click.sign === '+') {
      ctx.moveTo(pos.x - MARKER_RADIUS, pos.y);
      ctx.lineTo(pos.x + MARKER_RADIUS, pos.y);
      ctx.moveTo(pos.x, pos.y - MARKER_RADIUS);
      ctx.lineTo(pos.x, pos.y + MARKER_RADIUS);
    } else {
      const d = MARKER_RADIUS * Math.SQRT1_2;
      ctx.moveTo(pos.x - d, pos.y - d);
      ctx.lineTo(pos.x + d, pos.y + d);
      ctx.moveTo(pos.x - d, pos.y + d);
      ctx.lineTo(pos.x + d, pos.y - d);
    }
    ctx.stroke();
    ctx.restore();
  }
}

export async function decodeFrame(bytes: ArrayBuffer): Promise<ImageBitmap> {
  return createImageBitmap(new Blob([bytes], { type: 'image/png' }));
}
