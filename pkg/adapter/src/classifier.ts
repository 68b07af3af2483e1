/**
 * Classifier implementations behind the protocol loop.
 *
 * This is the seam for wrapping a real keyword-spotting model: implement
 * Classifier (declare a vocabulary, map one decoded WAV to one label) and
 * wire it up in main.ts. The two implementations here need no ML runtime,
 * so the adapter works out of the box and in CI.
 */
import { readFile } from "node:fs/promises";

import { bandEnergies } from "./spectrum.js";
import type { WavData } from "./wav.js";

export interface Classifier {
  readonly labels: string[];
  classify(wav: WavData): string;
}

/** Answers every request with "yes"; the vocabulary is the classic 10-keyword set. */
export class StubClassifier implements Classifier {
  readonly labels = ["yes", "no", "up", "down", "left", "right", "on", "off", "stop", "go"];

  classify(_wav: WavData): string {
    return "yes";
  }
}

export interface BandEnergyModel {
  edges: number[];
  labels: string[];
  weights?: number[];
}

/**
 * Labels audio by the sub-band with the most weighted spectral energy,
 * ties to the lowest band index. Matches the parent toolkit's built-in
 * band-energy classifier given the same model parameters, which makes
 * adapter wiring verifiable end to end before swapping in a real model.
 */
export class BandEnergyClassifier implements Classifier {
  readonly labels: string[];
  private readonly edges: number[];
  private readonly weights: number[];

  constructor(model: BandEnergyModel) {
    const { edges, labels } = model;
    if (!Array.isArray(edges) || edges.length < 2) {
      throw new Error("model edges must list at least 2 ascending Hz cut points");
    }
    for (let i = 1; i < edges.length; i++) {
      if (!(edges[i]! > edges[i - 1]!)) throw new Error("model edges must be ascending");
    }
    if (!Array.isArray(labels) || labels.length !== edges.length - 1) {
      throw new Error("model needs exactly one label per sub-band");
    }
    const weights = model.weights ?? labels.map(() => 1);
    if (!Array.isArray(weights) || weights.length !== labels.length) {
      throw new Error("model needs exactly one weight per sub-band");
    }
    this.edges = edges.map(Number);
    this.labels = labels.map(String);
    this.weights = weights.map(Number);
  }

  classify(wav: WavData): string {
    const energies = bandEnergies(wav.samples, wav.sampleRate, this.edges, this.weights);
    let best = 0;
    for (let i = 1; i < energies.length; i++) {
      if (energies[i]! > energies[best]!) best = i;
    }
    return this.labels[best]!;
  }
}

export async function loadBandEnergyModel(path: string): Promise<BandEnergyClassifier> {
  let raw: string;
  try {
    raw = await readFile(path, "utf8");
  } catch (err) {
    throw new Error(`cannot read model ${path}: ${(err as Error).message}`);
  }
  let parsed: unknown;
  try {
    parsed = JSON.parse(raw);
  } catch (err) {
    throw new Error(`model ${path} is not valid JSON: ${(err as Error).message}`);
  }
  return new BandEnergyClassifier(parsed as BandEnergyModel);
}
