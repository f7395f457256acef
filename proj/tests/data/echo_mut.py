#!/usr/bin/env python3
# Copyright 2026 The Fairgram Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Reference model for the line protocol.

Markers in the text select behaviour: CRASH exits with status 3, HANG never
replies, GARBAGE replies with a non-JSON line, ERROR replies with an error
object. Otherwise SA answers positive/negative/neutral from the words
"good"/"bad", coref links the first two words, and MLM gives every probe the
same confidence.
"""

import json
import sys
import time


def answer(req):
    text = req["text"]
    task = req["task"]
    if task == "sa":
        words = text.lower().split()
        if "good" in words:
            return {"sa": {"label": "positive", "score": 0.5}}
        if "bad" in words:
            return {"sa": {"label": "negative", "score": -0.5}}
        return {"sa": {"label": "neutral", "score": 0.0}}
    if task == "coref":
        words = text.split()
        return {"coref": [words[:2]] if len(words) >= 2 else []}
    probes = req.get("probes") or ["his", "her"]
    return {"mlm": {p: round(1.0 / (len(probes) + 1), 6) for p in probes}}


def main():
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        req = json.loads(line)
        text = req.get("text", "")
        if "CRASH" in text:
            sys.exit(3)
        if "HANG" in text:
            time.sleep(3600)
        if "GARBAGE" in text:
            print("this is not json", flush=True)
            continue
        if "ERROR" in text:
            reply = {"error": "requested failure"}
        else:
            reply = answer(req)
        reply = {"id": req["id"], **reply}
        print(json.dumps(reply), flush=True)


if __name__ == "__main__":
    main()
