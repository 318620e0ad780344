#!/usr/bin/env python3
"""Regenerate the bundled verb taxonomy (src/stixpipe/data/taxonomy.json).

A curated hypernym forest of ~200 verb synsets. Depths are chosen so the two
anchor similarities hold exactly under max-over-synsets Wu-Palmer:

    wup(attack, originate) = 2*2 / (5+5) = 0.4
    wup(attack, target)    = 2*2 / (5+3) = 0.5

Each tree root has depth 1; a lemma should normally live in one synset.
"""

from __future__ import annotations

import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "stixpipe" / "data" / "taxonomy.json"

# (synset id, parent id or None, lemmas)
FOREST: list[tuple[str, str | None, list[str]]] = [
    # ------------------------------------------------ act tree
    ("act.01", None, ["act"]),
    ("engage.02", "act.01", ["engage"]),
    ("contend.03", "engage.02", ["contend", "oppose", "confront"]),
    ("fight.04", "contend.03", ["fight", "combat", "battle"]),
    ("attack.05", "fight.04", ["attack", "assault", "strike", "raid", "ambush"]),
    ("aim.03", "engage.02", ["target", "aim"]),
    ("initiate.03", "engage.02", ["initiate", "pioneer"]),
    ("arise.04", "initiate.03", ["arise", "rise", "spring"]),
    ("originate.05", "arise.04", ["originate", "stem", "derive", "hail"]),
    ("participate.03", "engage.02", ["participate", "join"]),
    ("compete.04", "participate.03", ["compete", "contest"]),
    ("use.02", "act.01", ["use", "employ", "utilize", "utilise", "leverage", "apply"]),
    ("exploit.03", "use.02", ["exploit", "abuse", "misuse", "weaponize"]),
    ("practice.03", "use.02", ["practice", "exercise"]),
    ("deploy.03", "use.02", ["deploy", "wield"]),
    ("wrong.02", "act.01", ["wrong", "victimize"]),
    ("compromise.03", "wrong.02", ["compromise", "breach", "infiltrate", "penetrate"]),
    ("hack.04", "compromise.03", ["hack", "crack"]),
    ("infect.03", "wrong.02", ["infect", "contaminate", "poison"]),
    ("sabotage.03", "wrong.02", ["sabotage", "subvert", "undermine", "disrupt"]),
    ("deceive.03", "wrong.02", ["deceive", "mislead", "dupe", "trick", "lure"]),
    ("defraud.04", "deceive.03", ["defraud", "scam", "swindle", "phish"]),
    ("steal.03", "wrong.02", ["steal", "thieve", "pilfer", "loot", "plunder"]),
    ("control.02", "act.01", ["control", "command", "govern", "manage", "operate", "direct"]),
    ("administer.03", "control.02", ["administer", "oversee", "supervise"]),
    ("restrict.03", "control.02", ["restrict", "limit", "constrain", "contain"]),
    ("imitate.02", "act.01", ["imitate", "mimic", "emulate"]),
    ("impersonate.03", "imitate.02", ["impersonate", "masquerade", "pose", "spoof"]),
    ("work.02", "act.01", ["work", "function", "serve"]),
    ("perform.03", "work.02", ["perform", "execute", "conduct", "carry"]),
    ("launch.04", "perform.03", ["launch", "mount", "stage", "wage"]),
    ("behave.02", "act.01", ["behave"]),
    ("persist.03", "behave.02", ["persist", "persevere", "remain", "endure"]),
    ("hide.03", "behave.02", ["hide", "conceal", "cloak", "obfuscate", "disguise"]),
    ("evade.04", "hide.03", ["evade", "dodge", "elude", "bypass", "circumvent"]),
    ("protect.02", "act.01", ["protect", "defend", "guard", "shield"]),
    ("secure.03", "protect.02", ["secure", "harden", "fortify"]),
    ("prevent.03", "protect.02", ["prevent", "forestall", "block", "thwart"]),
    ("help.02", "act.01", ["help", "assist", "aid", "support"]),
    ("enable.03", "help.02", ["enable", "facilitate", "allow", "permit"]),
    ("try.02", "act.01", ["try", "attempt", "seek", "endeavor"]),
    ("succeed.02", "act.01", ["succeed", "manage"]),
    ("fail.02", "act.01", ["fail", "flop"]),

    # ------------------------------------------------ move tree
    ("move.01", None, ["move", "displace"]),
    ("transfer.02", "move.01", ["transfer", "relocate"]),
    ("deliver.03", "transfer.02", ["deliver", "distribute", "dispense", "serve"]),
    ("send.03", "transfer.02", ["send", "transmit", "ship", "dispatch", "forward", "route"]),
    ("download.03", "transfer.02", ["download", "fetch", "pull", "retrieve"]),
    ("upload.03", "transfer.02", ["upload", "push"]),
    ("exfiltrate.03", "transfer.02", ["exfiltrate", "smuggle", "siphon"]),
    ("drop.03", "transfer.02", ["drop", "deposit", "plant", "place"]),
    ("inject.03", "transfer.02", ["inject", "insert", "implant", "embed"]),
    ("travel.02", "move.01", ["travel", "go", "proceed"]),
    ("enter.03", "travel.02", ["enter", "arrive", "land"]),
    ("leave.03", "travel.02", ["leave", "depart", "exit", "escape"]),
    ("return.03", "travel.02", ["return", "revert"]),
    ("spread.03", "travel.02", ["spread", "propagate", "proliferate", "diffuse"]),
    ("pivot.03", "travel.02", ["pivot", "traverse"]),
    ("redirect.03", "travel.02", ["redirect", "reroute", "divert"]),
    ("remove.02", "move.01", ["remove", "withdraw", "extract", "strip"]),
    ("delete.03", "remove.02", ["delete", "erase", "wipe", "purge"]),

    # ------------------------------------------------ make tree
    ("make.01", None, ["make", "create"]),
    ("develop.02", "make.01", ["develop", "build", "construct", "engineer", "craft"]),
    ("author.03", "develop.02", ["author", "write", "compose", "pen", "code"]),
    ("compile.03", "develop.02", ["compile", "assemble", "package"]),
    ("generate.02", "make.01", ["generate", "produce", "yield"]),
    ("spawn.03", "generate.02", ["spawn", "fork"]),
    ("cause.02", "make.01", ["cause", "induce", "trigger", "provoke"]),
    ("establish.02", "make.01", ["establish", "found", "institute", "form"]),
    ("install.03", "establish.02", ["install", "set", "configure"]),
    ("register.03", "establish.02", ["register", "enroll"]),
    ("modify.02", "make.01", ["modify", "alter", "change", "transform"]),
    ("update.03", "modify.02", ["update", "upgrade", "patch", "revise"]),
    ("encode.03", "modify.02", ["encode", "encrypt", "encipher", "pack"]),
    ("decode.03", "modify.02", ["decode", "decrypt", "decipher", "unpack", "extract"]),
    ("rename.03", "modify.02", ["rename", "relabel"]),
    ("repair.02", "make.01", ["repair", "fix", "mend", "restore"]),
    ("destroy.02", "make.01", ["destroy", "demolish", "ruin", "wreck"]),
    ("damage.03", "destroy.02", ["damage", "harm", "impair", "corrupt"]),
    ("disable.03", "destroy.02", ["disable", "deactivate", "cripple", "paralyze"]),
    ("terminate.02", "make.01", ["terminate", "end", "stop", "kill", "halt"]),

    # ------------------------------------------------ change-of-degree tree
    ("change.01", None, ["vary"]),
    ("increase.02", "change.01", ["increase", "grow", "expand", "escalate", "amplify"]),
    ("intensify.03", "increase.02", ["intensify", "heighten", "deepen"]),
    ("decrease.02", "change.01", ["decrease", "lessen", "reduce", "diminish", "shrink"]),
    ("mitigate.03", "decrease.02", ["mitigate", "alleviate", "remediate", "dampen", "soften"]),
    ("improve.02", "change.01", ["improve", "better", "enhance", "refine"]),
    ("worsen.02", "change.01", ["worsen", "degrade", "deteriorate"]),
    ("begin.02", "change.01", ["begin", "start", "commence"]),
    ("continue.02", "change.01", ["continue", "resume", "proceed"]),
    ("emerge.02", "change.01", ["emerge", "appear", "surface", "materialize"]),
    ("vanish.02", "change.01", ["vanish", "disappear", "fade"]),

    # ------------------------------------------------ communicate tree
    ("communicate.01", None, ["communicate", "intercommunicate"]),
    ("beacon.02", "communicate.01", ["beacon", "broadcast", "signal"]),
    ("connect.02", "communicate.01", ["connect", "contact", "reach"]),
    ("inform.02", "communicate.01", ["inform", "notify", "brief", "advise"]),
    ("indicate.03", "inform.02", ["indicate", "point", "designate", "denote", "evidence"]),
    ("show.03", "inform.02", ["show", "demonstrate", "reveal", "expose", "display"]),
    ("report.03", "inform.02", ["report", "document", "disclose", "publish"]),
    ("warn.03", "inform.02", ["warn", "alert", "caution"]),
    ("claim.02", "communicate.01", ["claim", "assert", "allege", "maintain"]),
    ("confirm.03", "claim.02", ["confirm", "verify", "corroborate", "validate"]),
    ("deny.03", "claim.02", ["deny", "dispute", "refute"]),
    ("state.02", "communicate.01", ["state", "say", "declare", "announce"]),
    ("describe.03", "state.02", ["describe", "detail", "characterize", "portray"]),
    ("mention.03", "state.02", ["mention", "note", "cite", "reference"]),
    ("ask.02", "communicate.01", ["ask", "inquire", "query"]),
    ("request.03", "ask.02", ["request", "solicit", "demand"]),
    ("answer.02", "communicate.01", ["answer", "respond", "reply"]),
    ("name.02", "communicate.01", ["name", "call", "dub", "term", "christen"]),
    ("promise.02", "communicate.01", ["promise", "pledge", "vow"]),
    ("threaten.02", "communicate.01", ["threaten", "menace", "intimidate"]),

    # ------------------------------------------------ think tree
    ("think.01", None, ["think", "cogitate"]),
    ("evaluate.02", "think.01", ["evaluate", "judge", "assess", "appraise"]),
    ("attribute.03", "evaluate.02", ["attribute", "ascribe", "impute", "credit", "blame"]),
    ("relate.03", "evaluate.02", ["relate", "associate", "link", "tie", "connect", "correlate"]),
    ("rank.03", "evaluate.02", ["rank", "rate", "grade", "classify"]),
    ("analyze.02", "think.01", ["analyze", "analyse", "examine", "study", "investigate", "dissect"]),
    ("compare.03", "analyze.02", ["compare", "contrast", "match"]),
    ("conclude.02", "think.01", ["conclude", "infer", "deduce", "reason"]),
    ("decide.03", "conclude.02", ["decide", "determine", "resolve"]),
    ("suspect.02", "think.01", ["suspect", "surmise", "presume"]),
    ("believe.02", "think.01", ["believe", "consider", "deem", "regard"]),
    ("expect.02", "think.01", ["expect", "anticipate", "await"]),
    ("plan.02", "think.01", ["plan", "design", "devise", "orchestrate", "scheme"]),
    ("intend.03", "plan.02", ["intend", "mean", "purpose"]),
    ("remember.02", "think.01", ["remember", "recall", "recollect"]),

    # ------------------------------------------------ perceive tree
    ("perceive.01", None, ["perceive", "sense"]),
    ("observe.02", "perceive.01", ["observe", "watch", "monitor", "surveil"]),
    ("spot.03", "observe.02", ["spot", "sight", "glimpse", "notice"]),
    ("detect.02", "perceive.01", ["detect", "discover", "find", "uncover", "unearth"]),
    ("identify.03", "detect.02", ["identify", "recognize", "recognise", "pinpoint"]),
    ("locate.03", "detect.02", ["locate", "situate", "site", "position"]),
    ("track.03", "detect.02", ["track", "trace", "follow", "trail", "hunt"]),
    ("scan.02", "perceive.01", ["scan", "probe", "survey", "sweep", "enumerate"]),
    ("hear.02", "perceive.01", ["hear", "listen"]),
    ("see.02", "perceive.01", ["see", "view", "witness"]),
    ("read.03", "see.02", ["read", "peruse", "parse"]),

    # ------------------------------------------------ possess tree
    ("possess.01", None, ["possess", "have"]),
    ("own.02", "possess.01", ["own", "hold"]),
    ("host.02", "possess.01", ["host", "harbor", "harbour", "accommodate", "house"]),
    ("acquire.02", "possess.01", ["acquire", "get", "gain", "obtain", "procure", "secure"]),
    ("take.03", "acquire.02", ["take", "seize", "capture", "grab", "snatch"]),
    ("harvest.03", "acquire.02", ["harvest", "collect", "gather", "amass", "accumulate"]),
    ("buy.03", "acquire.02", ["buy", "purchase"]),
    ("receive.03", "acquire.02", ["receive", "accept"]),
    ("keep.02", "possess.01", ["keep", "retain", "store", "stash", "maintain"]),
    ("lose.02", "possess.01", ["lose", "forfeit", "surrender"]),
    ("give.02", "possess.01", ["give", "grant", "provide", "supply", "furnish", "offer"]),
    ("sell.03", "give.02", ["sell", "market", "vend", "peddle"]),
    ("lease.03", "give.02", ["lease", "rent", "let"]),

    # ------------------------------------------------ be tree
    ("be.01", None, ["be", "exist"]),
    ("reside.02", "be.01", ["reside", "dwell", "live", "inhabit", "occupy"]),
    ("stay.02", "be.01", ["stay", "linger", "lurk"]),
    ("belong.02", "be.01", ["belong", "pertain"]),
    ("constitute.02", "be.01", ["constitute", "comprise", "form", "compose"]),
    ("represent.03", "constitute.02", ["represent", "embody", "typify"]),
    ("resemble.02", "be.01", ["resemble", "approximate"]),
    ("depend.02", "be.01", ["depend", "rely", "hinge"]),
    ("involve.02", "be.01", ["involve", "entail", "encompass", "include"]),
    ("concern.03", "involve.02", ["concern", "regard", "affect", "touch"]),
    ("base.02", "be.01", ["base", "ground", "found", "root"]),
]


def main() -> None:
    ids = [sid for sid, _, _ in FOREST]
    assert len(ids) == len(set(ids)), "duplicate synset id"
    known = set(ids)
    for sid, parent, _ in FOREST:
        assert parent is None or parent in known, f"missing parent for {sid}"

    data = {
        "version": 1,
        "synsets": [
            {"id": sid, "parent": parent, "lemmas": lemmas}
            for sid, parent, lemmas in FOREST
        ],
    }
    OUT.write_text(json.dumps(data, indent=1), encoding="utf-8")

    depth = {}
    parent_of = {sid: parent for sid, parent, _ in FOREST}

    def d(s):
        if s not in depth:
            depth[s] = 1 if parent_of[s] is None else d(parent_of[s]) + 1
        return depth[s]

    def wup(a, b):
        anc_a, cur = [], a
        while cur:
            anc_a.append(cur)
            cur = parent_of[cur]
        cur, lcs = b, None
        while cur:
            if cur in anc_a:
                lcs = cur
                break
            cur = parent_of[cur]
        if lcs is None:
            return 0.0
        return 2 * d(lcs) / (d(a) + d(b))

    print(f"wrote {len(FOREST)} synsets to {OUT}")
    print("wup(attack, originate) =", wup("attack.05", "originate.05"))
    print("wup(attack, target)    =", wup("attack.05", "aim.03"))


if __name__ == "__main__":
    main()
