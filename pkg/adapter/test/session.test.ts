import { writeFile } from "node:fs/promises";
import { join } from "node:path";
import { PassThrough, type Writable } from "node:stream";
import { describe, expect, it } from "vitest";

import { BandEnergyClassifier, StubClassifier } from "../src/classifier.js";
import { serve } from "../src/session.js";
import { tempDir, tone, writeTempWav } from "./helpers.js";

class Sink {
  chunks: string[] = [];

  write(chunk: string): boolean {
    this.chunks.push(chunk);
    return true;
  }

  lines(): string[] {
    return this.chunks.join("").split("\n").filter((l) => l !== "");
  }
}

async function run(requests: string[], classifier = new StubClassifier()): Promise<string[]> {
  const input = new PassThrough();
  const sink = new Sink();
  const done = serve(classifier, input, sink as unknown as Writable);
  for (const request of requests) input.write(request + "\n");
  input.end();
  await done;
  return sink.lines();
}

describe("serve", () => {
  it("opens with the vocabulary and READY", async () => {
    const lines = await run([]);
    expect(lines[0]).toBe("VOCAB yes no up down left right on off stop go");
    expect(lines[1]).toBe("READY");
    expect(lines).toHaveLength(2);
  });

  it("answers LABEL yes for a readable wav in stub mode", async () => {
    const dir = await tempDir();
    const path = await writeTempWav(dir, "a.wav", [1, 2, 3, 4]);
    const lines = await run([`CLASSIFY ${path}`, "QUIT"]);
    expect(lines[2]).toBe("LABEL yes");
    expect(lines).toHaveLength(3);
  });

  it("recovers after an unreadable path", async () => {
    const dir = await tempDir();
    const good = await writeTempWav(dir, "good.wav", [9, 9, 9]);
    const lines = await run([
      "CLASSIFY /no/such/file.wav",
      `CLASSIFY ${good}`,
      "QUIT",
    ]);
    expect(lines[2]).toMatch(/^ERROR cannot read/);
    expect(lines[3]).toBe("LABEL yes");
  });

  it("reports the parse reason for non-wav bytes", async () => {
    const dir = await tempDir();
    const path = join(dir, "noise.bin");
    await writeFile(path, Buffer.from("definitely not audio"));
    const lines = await run([`CLASSIFY ${path}`, "QUIT"]);
    expect(lines[2]).toMatch(/^ERROR .*RIFF/);
  });

  it("rejects unknown requests but keeps serving", async () => {
    const dir = await tempDir();
    const good = await writeTempWav(dir, "ok.wav", [1]);
    const lines = await run(["PING 1 2 3", `CLASSIFY ${good}`, "QUIT"]);
    expect(lines[2]).toBe("ERROR unrecognized request PING");
    expect(lines[3]).toBe("LABEL yes");
  });

  it("ignores blank lines", async () => {
    const lines = await run(["", "   ", "QUIT"]);
    expect(lines).toHaveLength(2);
  });

  it("stops at QUIT and answers nothing after it", async () => {
    const dir = await tempDir();
    const good = await writeTempWav(dir, "late.wav", [1]);
    const lines = await run(["QUIT", `CLASSIFY ${good}`]);
    expect(lines).toHaveLength(2);
  });

  it("ends cleanly on end of input without QUIT", async () => {
    const lines = await run([]);
    expect(lines).toHaveLength(2);
  });

  it("serves band-energy labels with a model", async () => {
    const classifier = new BandEnergyClassifier({
      edges: [0, 2000, 4000, 6000, 8000],
      labels: ["low", "midlow", "midhigh", "high"],
    });
    const dir = await tempDir();
    const midlow = await writeTempWav(dir, "midlow.wav", tone(3000));
    const high = await writeTempWav(dir, "high.wav", tone(7000));
    const silent = await writeTempWav(dir, "silent.wav", new Int16Array(64));
    const lines = await run(
      [`CLASSIFY ${midlow}`, `CLASSIFY ${high}`, `CLASSIFY ${silent}`, "QUIT"],
      classifier,
    );
    expect(lines.slice(2)).toEqual(["LABEL midlow", "LABEL high", "LABEL low"]);
  });
});

describe("BandEnergyClassifier validation", () => {
  it("rejects unsorted edges", () => {
    expect(
      () => new BandEnergyClassifier({ edges: [0, 4000, 2000], labels: ["a", "b"] }),
    ).toThrow(/ascending/);
  });

  it("rejects label count mismatch", () => {
    expect(
      () => new BandEnergyClassifier({ edges: [0, 8000], labels: ["a", "b"] }),
    ).toThrow(/one label per sub-band/);
  });

  it("rejects weight count mismatch", () => {
    expect(
      () =>
        new BandEnergyClassifier({
          edges: [0, 4000, 8000],
          labels: ["a", "b"],
          weights: [1],
        }),
    ).toThrow(/one weight per sub-band/);
  });
});
