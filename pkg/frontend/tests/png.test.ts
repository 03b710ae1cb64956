import * as zlib from 'node:zlib';

import { describe, expect, it } from 'vitest';

import { countRegions, decodeGray, encodeGray16 } from './png';

describe('png helper', () => {
  it('round-trips 16-bit grayscale values above 255', () => {
    const width = 5;
    const height = 4;
    const values = new Uint16Array(width * height);
    for (let i = 0; i < values.length; i++) values[i] = (i * 977) % 65536;
    const img = decodeGray(encodeGray16(values, width, height));
    expect(img.width).toBe(width);
    expect(img.height).toBe(height);
    expect(Array.from(img.values)).toEqual(Array.from(values));
  });

  it('unfilters sub/up/average/paeth scanlines', () => {
    // hand-filter 4 rows of 3 16-bit samples, one filter type per row
    const width = 3;
    const stride = width * 2;
    const rows = [
      [0, 10, 0, 20, 0, 30],
      [0, 40, 0, 50, 0, 60],
      [1, 70, 1, 80, 1, 90],
      [2, 5, 2, 15, 2, 25],
    ].map((r) => Uint8Array.from(r));
    const filters = [1, 2, 3, 4]; // sub, up, average, paeth

    const paeth = (a: number, b: number, c: number) => {
      const p = a + b - c;
      const [pa, pb, pc] = [Math.abs(p - a), Math.abs(p - b), Math.abs(p - c)];
      if (pa <= pb && pa <= pc) return a;
      return pb <= pc ? b : c;
    };

    const raw = Buffer.alloc(rows.length * (stride + 1));
    const recon: Uint8Array[] = [];
    rows.forEach((row, y) => {
      const filter = filters[y];
      raw[y * (stride + 1)] = filter;
      const out = new Uint8Array(stride);
      for (let i = 0; i < stride; i++) {
        const left = i >= 2 ? row[i - 2] : 0;
        const up = y > 0 ? recon[y - 1][i] : 0;
        const upLeft = y > 0 && i >= 2 ? recon[y - 1][i - 2] : 0;
        let predictor = 0;
        if (filter === 1) predictor = left;
        else if (filter === 2) predictor = up;
        else if (filter === 3) predictor = (left + up) >> 1;
        else if (filter === 4) predictor = paeth(left, up, upLeft);
        out[i] = (row[i] - predictor) & 0xff;
        raw[y * (stride + 1) + 1 + i] = out[i];
      }
      recon.push(row);
    });

    // wrap the filtered scanlines into a PNG container by reusing the
    // encoder's chunk layout via a tiny patch: encode zeros, then swap IDAT
    const template = encodeGray16(new Uint16Array(width * rows.length), width, rows.length);
    const idatStart = template.indexOf('IDAT', 8, 'ascii') - 4;
    const idatLen = template.readUInt32BE(idatStart);
    const before = template.subarray(0, idatStart);
    const after = template.subarray(idatStart + 12 + idatLen);
    const compressed = zlib.deflateSync(raw);
    const crcTable = new Uint32Array(256).map((_, n) => {
      let c = n;
      for (let k = 0; k < 8; k++) c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
      return c >>> 0;
    });
    const crc32 = (buf: Buffer) => {
      let crc = 0xffffffff;
      for (const byte of buf) crc = crcTable[(crc ^ byte) & 0xff] ^ (crc >>> 8);
      return (crc ^ 0xffffffff) >>> 0;
    };
    const head = Buffer.concat([Buffer.from('IDAT', 'ascii'), compressed]);
    const idat = Buffer.alloc(head.length + 8);
    idat.writeUInt32BE(compressed.length, 0);
    head.copy(idat, 4);
    idat.writeUInt32BE(crc32(head), head.length + 4);

    const img = decodeGray(Buffer.concat([before, idat, after]));
    const expected = rows.map((row) => {
      const vals = [];
      for (let x = 0; x < width; x++) vals.push((row[x * 2] << 8) | row[x * 2 + 1]);
      return vals;
    });
    expect(Array.from(img.values)).toEqual(expected.flat());
  });

  it('counts distinct labels inside a predicate', () => {
    const values = Uint16Array.from([0, 0, 1, 1, 2, 2, 3, 3]);
    const img = { width: 4, height: 2, values };
    expect(countRegions(img, (x) => x < 2)).toBe(2);
    expect(countRegions(img, () => true)).toBe(4);
  });
});
