"""Wire-protocol stub used by the external-classifier tests.

Usage: stub_classifier.py [mode]

Modes:
  ok           declare VOCAB yes no, answer LABEL yes to everything (default)
  bad-label    answer with a label outside the declared vocabulary
  die          exit abruptly right after READY
  sleepy       never answer classify requests
  strict       answer LABEL yes for readable WAV paths, ERROR otherwise
  error        answer ERROR to every classify request
  error-once   answer ERROR to the first classify request, LABEL yes after
  no-vocab     skip the VOCAB line entirely
"""

import os
import sys
import time


def main() -> int:
    mode = sys.argv[1] if len(sys.argv) > 1 else "ok"
    out = sys.stdout

    if mode != "no-vocab":
        out.write("VOCAB yes no\n")
    out.write("READY\n")
    out.flush()

    if mode == "die":
        return 0

    answered = 0
    for line in sys.stdin:
        line = line.rstrip("\n")
        if line == "QUIT":
            return 0
        if not line.startswith("CLASSIFY "):
            out.write("ERROR unknown request\n")
            out.flush()
            continue
        if mode == "sleepy":
            time.sleep(3600)
        path = line[len("CLASSIFY "):]
        if mode == "bad-label":
            out.write("LABEL banana\n")
        elif mode == "error":
            out.write("ERROR cannot process request\n")
        elif mode == "error-once" and answered == 0:
            out.write("ERROR transient failure\n")
        elif mode == "strict" and not os.path.isfile(path):
            out.write(f"ERROR cannot read {path}\n")
        else:
            out.write("LABEL yes\n")
        out.flush()
        answered += 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
