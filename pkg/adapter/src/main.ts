#!/usr/bin/env node
/**
 * Entry point. Run with --stub for the dependency-free stub classifier, or
 * --model <path> for a band-energy model described by a small JSON file
 * ({"edges": [...Hz cut points], "labels": [...], "weights": [...]}).
 *
 * Spoken to over stdin/stdout by the parent toolkit via
 * `--classifier exec:"node dist/main.js --stub"`.
 */
import process from "node:process";

import { loadBandEnergyModel, StubClassifier, type Classifier } from "./classifier.js";
import { serve } from "./session.js";

const USAGE = "usage: main.js --stub | --model <model.json>";

async function pickClassifier(argv: string[]): Promise<Classifier> {
  if (argv.length === 1 && argv[0] === "--stub") {
    return new StubClassifier();
  }
  if (argv.length === 2 && argv[0] === "--model") {
    return loadBandEnergyModel(argv[1]!);
  }
  throw new Error(USAGE);
}

async function main(): Promise<number> {
  let classifier: Classifier;
  try {
    classifier = await pickClassifier(process.argv.slice(2));
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  await serve(classifier, process.stdin, process.stdout);
  return 0;
}

main().then(
  (code) => process.exit(code),
  (err) => {
    console.error((err as Error).message);
    process.exit(1);
  },
);
