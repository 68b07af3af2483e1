import { mkdtemp, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface WavOptions {
  sampleRate?: number;
  channels?: number;
  bits?: number;
  format?: number;
}

/** Build a complete RIFF/WAVE byte buffer; options exist to build bad ones. */
export function wavBuffer(samples: ArrayLike<number>, options: WavOptions = {}): Buffer {
  const { sampleRate = 16000, channels = 1, bits = 16, format = 1 } = options;
  const bytesPer = bits / 8;
  const dataSize = samples.length * bytesPer;
  const buf = Buffer.alloc(44 + dataSize);
  buf.write("RIFF", 0, "latin1");
  buf.writeUInt32LE(36 + dataSize, 4);
  buf.write("WAVE", 8, "latin1");
  buf.write("fmt ", 12, "latin1");
  buf.writeUInt32LE(16, 16);
  buf.writeUInt16LE(format, 20);
  buf.writeUInt16LE(channels, 22);
  buf.writeUInt32LE(sampleRate, 24);
  buf.writeUInt32LE(sampleRate * channels * bytesPer, 28);
  buf.writeUInt16LE(channels * bytesPer, 32);
  buf.writeUInt16LE(bits, 34);
  buf.write("data", 36, "latin1");
  buf.writeUInt32LE(dataSize, 40);
  for (let i = 0; i < samples.length; i++) {
    if (bits === 16) buf.writeInt16LE(Number(samples[i]), 44 + 2 * i);
    else buf.writeUInt8(Number(samples[i]) & 0xff, 44 + i);
  }
  return buf;
}

export async function tempDir(): Promise<string> {
  return mkdtemp(join(tmpdir(), "adapter-test-"));
}

export async function writeTempWav(
  dir: string,
  name: string,
  samples: ArrayLike<number>,
  options: WavOptions = {},
): Promise<string> {
  const path = join(dir, name);
  await writeFile(path, wavBuffer(samples, options));
  return path;
}

/** Bin-aligned int16 tone, so its spectral energy sits in a single DFT bin. */
export function tone(freq: number, n = 1024, sampleRate = 16000, amplitude = 8000): Int16Array {
  const out = new Int16Array(n);
  for (let t = 0; t < n; t++) {
    out[t] = Math.round(amplitude * Math.sin((2 * Math.PI * freq * t) / sampleRate));
  }
  return out;
}
