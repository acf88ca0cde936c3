"""Expected preference pairs for a sample-set file, by direct enumeration.

Relies on every sample carrying an explicit "correct" flag and on commands
being written in canonical form, so the comment is whatever follows " # ".
"""
import json
import sys


def command(action):
    return action.split(" # ", 1)[0]


for line in open(sys.argv[1], encoding="utf-8"):
    if not line.strip():
        continue
    s = json.loads(line)
    flags = [x["correct"] for x in s["samples"]]
    if not any(flags) or all(flags):
        continue
    seen = {command(s["gold"])}
    for x in s["samples"]:
        if x["correct"] or command(x["action"]) in seen:
            continue
        seen.add(command(x["action"]))
        print(json.dumps({"prompt": s["prompt"], "chosen": s["gold"], "rejected": x["action"]},
                         ensure_ascii=False, separators=(",", ":")))
