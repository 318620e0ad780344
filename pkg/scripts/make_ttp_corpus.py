#!/usr/bin/env python3
"""Regenerate the bundled toy TTP corpus (src/stixpipe/data/ttp_corpus.jsonl).

240 short synthetic report snippets over the 10 bundled labels; each document
samples keywords from its labels' pools plus shared filler, ~30% carry two
labels. Deterministic under the fixed seed.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "stixpipe" / "data" / "ttp_corpus.jsonl"

SEED = 13
N_DOCS = 240

POOLS = {
    "TA0001": ["spearphishing", "lure", "foothold", "perimeter", "delivery",
               "initial", "access", "public-facing", "exploit", "intrusion",
               "entry", "beachhead"],
    "TA0002": ["execute", "execution", "command", "payload", "run", "launch",
               "process", "invoke", "spawn", "interpreter", "shellcode"],
    "TA0003": ["persistence", "service", "scheduled", "task", "implant",
               "survive", "reboot", "foothold", "install", "cron", "daemon"],
    "TA0005": ["evasion", "masquerade", "disable", "defender", "bypass",
               "hide", "stealth", "unhook", "tamper", "whitelisting", "amsi"],
    "TA0007": ["discovery", "enumerate", "reconnaissance", "survey",
               "inventory", "query", "list", "shares", "hosts", "mapping"],
    "T1059": ["powershell", "cmd", "bash", "python", "one-liner", "script",
              "encodedcommand", "vbs", "macro", "wscript", "shell"],
    "T1566": ["phishing", "email", "attachment", "link", "credential",
              "spoofed", "sender", "inbox", "malicious", "document", "lures"],
    "T1518": ["software", "installed", "applications", "antivirus",
              "products", "versions", "detect", "security", "edr", "agents"],
    "T1547": ["autostart", "runkey", "startup", "folder", "boot", "logon",
              "registry", "winlogon", "hklm", "userinit"],
    "T1027": ["obfuscated", "base64", "encoded", "packed", "crypter",
              "strings", "xor", "compressed", "hidden", "junk", "padding"],
}

FILLER = ["the", "actor", "observed", "campaign", "victim", "organization",
          "during", "analysis", "sample", "network", "environment", "activity",
          "operators", "infrastructure", "followed", "by", "across", "multiple",
          "stages", "of", "this", "report", "describes"]


def main() -> None:
    rng = random.Random(SEED)
    labels = sorted(POOLS)
    docs = []
    for i in range(N_DOCS):
        k = 2 if rng.random() < 0.3 else 1
        chosen = rng.sample(labels, k)
        words: list[str] = []
        for label in chosen:
            words += rng.choices(POOLS[label], k=rng.randint(5, 9))
        words += rng.choices(FILLER, k=rng.randint(4, 8))
        rng.shuffle(words)
        docs.append({"text": " ".join(words), "labels": sorted(chosen)})
    with open(OUT, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(doc) + "\n")
    print(f"wrote {len(docs)} documents to {OUT}")


if __name__ == "__main__":
    main()
