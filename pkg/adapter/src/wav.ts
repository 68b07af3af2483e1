/**
 * Minimal WAV reader for the audio the protocol hands over:
 * 16-bit mono PCM, any sample rate. Everything else is rejected loudly
 * so a bad request turns into one ERROR reply instead of a wrong label.
 */
import { readFile } from "node:fs/promises";

export class WavError extends Error {}

export interface WavData {
  sampleRate: number;
  samples: Int16Array;
}

export async function readWav(path: string): Promise<WavData> {
  let raw: Buffer;
  try {
    raw = await readFile(path);
  } catch (err) {
    throw new WavError(`cannot read ${path}: ${(err as Error).message}`);
  }
  return parseWav(raw);
}

export function parseWav(raw: Buffer): WavData {
  const view = new DataView(raw.buffer, raw.byteOffset, raw.byteLength);
  if (raw.length < 12 || ascii(raw, 0, 4) !== "RIFF") {
    throw new WavError("not a RIFF file");
  }
  if (ascii(raw, 8, 4) !== "WAVE") {
    throw new WavError("not a WAVE file");
  }

  let sampleRate = 0;
  let haveFmt = false;
  let offset = 12;
  while (offset + 8 <= raw.length) {
    const chunkId = ascii(raw, offset, 4);
    const chunkSize = view.getUint32(offset + 4, true);
    const body = offset + 8;
    if (body + chunkSize > raw.length) {
      throw new WavError(`truncated ${chunkId.trim()} chunk`);
    }
    if (chunkId === "fmt ") {
      if (chunkSize < 16) throw new WavError("fmt chunk too small");
      const format = view.getUint16(body, true);
      const channels = view.getUint16(body + 2, true);
      sampleRate = view.getUint32(body + 4, true);
      const bits = view.getUint16(body + 14, true);
      if (format !== 1) throw new WavError(`unsupported format code ${format}, want PCM`);
      if (channels !== 1) throw new WavError(`unsupported channel count ${channels}, want mono`);
      if (bits !== 16) throw new WavError(`unsupported bit depth ${bits}, want 16`);
      haveFmt = true;
    } else if (chunkId === "data") {
      if (!haveFmt) throw new WavError("data chunk before fmt chunk");
      if (chunkSize % 2 !== 0) throw new WavError("odd data chunk size");
      const n = chunkSize / 2;
      if (n === 0) throw new WavError("empty data chunk");
      const samples = new Int16Array(n);
      for (let i = 0; i < n; i++) {
        samples[i] = view.getInt16(body + 2 * i, true);
      }
      return { sampleRate, samples };
    }
    // chunks are word-aligned; skip the pad byte after odd sizes
    offset = body + chunkSize + (chunkSize % 2);
  }
  throw new WavError(haveFmt ? "missing data chunk" : "missing fmt chunk");
}

function ascii(raw: Buffer, start: number, length: number): string {
  return raw.toString("latin1", start, start + length);
}
