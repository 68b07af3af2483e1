/**
 * The request loop of the wire protocol, one reply line per request line:
 *
 *   out:  VOCAB <label> <label> ...
 *   out:  READY
 *   in:   CLASSIFY <absolute path>.wav   ->  LABEL <label> | ERROR <reason>
 *   in:   QUIT                           ->  loop ends, caller exits 0
 *
 * A failed request answers ERROR and keeps the session alive; only QUIT or
 * end of input ends it.
 */
import { createInterface } from "node:readline";
import type { Readable, Writable } from "node:stream";

import type { Classifier } from "./classifier.js";
import { readWav } from "./wav.js";

export async function serve(
  classifier: Classifier,
  input: Readable,
  output: Writable,
): Promise<void> {
  output.write(`VOCAB ${classifier.labels.join(" ")}\n`);
  output.write("READY\n");
  for await (const line of createInterface({ input })) {
    const request = line.trim();
    if (request === "") continue;
    if (request === "QUIT") return;
    if (request.startsWith("CLASSIFY ")) {
      const path = request.slice("CLASSIFY ".length).trim();
      try {
        const wav = await readWav(path);
        output.write(`LABEL ${classifier.classify(wav)}\n`);
      } catch (err) {
        output.write(`ERROR ${oneLine((err as Error).message)}\n`);
      }
    } else {
      output.write(`ERROR unrecognized request ${oneLine(request.split(" ")[0] ?? "")}\n`);
    }
  }
}

function oneLine(text: string): string {
  const flat = text.replace(/\s+/g, " ").trim();
  return flat === "" ? "unspecified failure" : flat;
}
