import { describe, expect, it } from "vitest";

import { bandEnergies, powerSpectrum } from "../src/spectrum.js";
import { tone } from "./helpers.js";

/** Textbook DFT, the oracle both fft paths are checked against. */
function oraclePower(samples: number[]): number[] {
  const n = samples.length;
  const half = Math.floor(n / 2);
  const out: number[] = [];
  for (let k = 0; k <= half; k++) {
    let re = 0;
    let im = 0;
    for (let t = 0; t < n; t++) {
      const angle = (-2 * Math.PI * k * t) / n;
      re += samples[t]! * Math.cos(angle);
      im += samples[t]! * Math.sin(angle);
    }
    out.push(re * re + im * im);
  }
  return out;
}

function randomSamples(n: number, seed: number): number[] {
  // tiny LCG; the values just need to be deterministic and varied
  let state = seed >>> 0;
  const out: number[] = [];
  for (let i = 0; i < n; i++) {
    state = (state * 1664525 + 1013904223) >>> 0;
    out.push((state / 2 ** 31) - 1);
  }
  return out;
}

describe("powerSpectrum", () => {
  it("matches the direct DFT on power-of-two lengths", () => {
    for (const seed of [1, 2, 3]) {
      const samples = randomSamples(64, seed);
      const fast = powerSpectrum(samples);
      const slow = oraclePower(samples);
      expect(fast.length).toBe(33);
      for (let k = 0; k < slow.length; k++) {
        expect(fast[k]).toBeCloseTo(slow[k]!, 6);
      }
    }
  });

  it("matches the direct DFT on non-power-of-two lengths", () => {
    const samples = randomSamples(48, 9);
    const fast = powerSpectrum(samples);
    const slow = oraclePower(samples);
    expect(fast.length).toBe(25);
    for (let k = 0; k < slow.length; k++) {
      expect(fast[k]).toBeCloseTo(slow[k]!, 6);
    }
  });

  it("puts a bin-aligned tone's energy in exactly one bin", () => {
    const n = 64;
    const amplitude = 100;
    const samples = Array.from({ length: n }, (_, t) =>
      amplitude * Math.sin((2 * Math.PI * 4 * t) / n),
    );
    const power = powerSpectrum(samples);
    expect(power[4]).toBeCloseTo((amplitude * n) ** 2 / 4, 4);
    for (let k = 0; k < power.length; k++) {
      if (k !== 4) expect(power[k]!).toBeLessThan(1e-6);
    }
  });

  it("rejects empty input", () => {
    expect(() => powerSpectrum([])).toThrow(/empty/);
  });
});

describe("bandEnergies", () => {
  const edges = [0, 2000, 4000, 6000, 8000];
  const unit = [1, 1, 1, 1];

  it("assigns an interior tone to its band", () => {
    const energies = bandEnergies(tone(3000, 1024), 16000, edges, unit);
    const best = energies.indexOf(Math.max(...energies));
    expect(best).toBe(1);
    expect(energies[1]!).toBeGreaterThan(1e6);
  });

  it("assigns a shared-edge bin to the upper band, half-open rule", () => {
    // n=16 at 16 kHz puts bins exactly on 0,1000,...,8000 Hz
    const n = 16;
    const samples = Array.from({ length: n }, (_, t) =>
      Math.cos((2 * Math.PI * 2 * t) / n),
    );
    const energies = bandEnergies(samples, 16000, edges, unit);
    expect(energies[1]!).toBeGreaterThan(1);
    expect(energies[0]!).toBeLessThan(1e-9);
  });

  it("closes the last band at the top edge", () => {
    const n = 16;
    const samples = Array.from({ length: n }, (_, t) =>
      Math.cos((2 * Math.PI * 8 * t) / n),
    );
    const energies = bandEnergies(samples, 16000, edges, unit);
    expect(energies[3]!).toBeGreaterThan(1);
    expect(energies[0]! + energies[1]! + energies[2]!).toBeLessThan(1e-9);
  });

  it("applies per-band weights", () => {
    const plain = bandEnergies(tone(3000, 1024), 16000, edges, unit);
    const boosted = bandEnergies(tone(3000, 1024), 16000, edges, [1, 7, 1, 1]);
    expect(boosted[1]).toBeCloseTo(7 * plain[1]!, 6);
  });
});
