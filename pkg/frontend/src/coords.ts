/**
 * Canvas <-> image coordinate mapping.
 *
 * The image is drawn scaled by `scale` with its origin at
 * (offsetX, offsetY) in canvas space. Clicks sent to the server must be
 * image pixels regardless of zoom, so every pointer position goes through
 * canvasToImage before it is staged.
 */

export interface CanvasTransform {
  scale: number;
  offsetX: number;
  offsetY: number;
}

export interface Point {
  x: number;
  y: number;
}

/** Largest centered transform fitting the image into the canvas. */
export function fitTransform(
  imageWidth: number,
  imageHeight: number,
  canvasWidth: number,
  canvasHeight: number,
): CanvasTransform {
  const scale = Math.min(canvasWidth / imageWidth, canvasHeight / imageHeight);
  return {
    scale,
    offsetX: (canvasWidth - imageWidth * scale) / 2,
    offsetY: (canvasHeight - imageHeight * scale) / 2,
  };
}

/** Canvas position of an image pixel's center. */
export function imageToCanvas(pixel: Point, t: CanvasTransform): Point {
  return {
    x: (pixel.x + 0.5) * t.scale + t.offsetX,
    y: (pixel.y + 0.5) * t.scale + t.offsetY,
  };
}

/**
 * Image pixel under a canvas position, or null when the position falls
 * outside the drawn image.
 */
export function canvasToImage(
  pos: Point,
  t: CanvasTransform,
  imageWidth: number,
  imageHeight: number,
): Point | null {
  const x = Math.floor((pos.x - t.offsetX) / t.scale);
  const y = Math.floor((pos.y - t.offsetY) / t.scale);
  if (x < 0 || y < 0 || x >= imageWidth || y >= imageHeight) return null;
  return { x, y };
}
