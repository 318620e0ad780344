#!/usr/bin/env python3
"""Regenerate the bundled POS lexicon and lemma exception table.

Closed-class words are listed explicitly; open-class stems are expanded into
their regular inflected forms so the tagger sees one majority tag per word
form. Output goes to src/stixpipe/data/{pos_lexicon.tsv,lemma_exceptions.tsv}.
"""

from __future__ import annotations

from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "stixpipe" / "data"

DET = """the a an this that these those each every some any no all both either neither
another such its his her their our your my""".split()

PRON = """i you he she it we they me him them us mine yours hers ours theirs myself
yourself himself herself itself ourselves themselves who whom whose which what
something anything nothing everything someone anyone everyone nobody somebody
everybody one oneself""".split()

ADP = """in on at by for with from of into onto over under through between among
against during within without across behind beyond about above below after
before via per toward towards upon inside outside near since until unless
because although while whereas if though amid despite regarding throughout
along around off up down out as""".split()

AUX = """am is are was were be been being have has had having do does did will
would shall should can could may might must""".split()

CCONJ = "and or but nor plus".split()

PART = "to not n't".split()

ADV = """very also now then here there often always never soon already still yet
again once twice later earlier together especially particularly mainly mostly
widely highly well far too quite rather almost even just only more most less
least further instead meanwhile moreover however therefore thus hence first
second next finally previously recently subsequently initially additionally
furthermore likewise otherwise elsewhere abroad overseas nearby alike""".split()

NUM = """zero one two three four five six seven eight nine ten eleven twelve
twenty thirty forty fifty hundred thousand million billion dozen first? second?
""".replace("first?", "").replace("second?", "").split()

# Verbs whose base form doubles as a common noun get their -s form tagged VERB
# and the bare form tagged NOUN (see DUAL below).
VERBS = """use attack target originate deploy deliver exploit compromise
communicate indicate mitigate locate attribute leverage employ execute install
download upload drop inject encrypt decrypt decode encode steal exfiltrate
infect spread distribute launch perform conduct operate control command access
breach hack phish spoof impersonate scan enumerate discover detect identify
observe report publish analyze investigate monitor track name dub call know
link connect associate relate base start begin create develop write build
modify change update patch fix remove delete destroy disable enable avoid
evade bypass hide obfuscate persist maintain establish gain obtain acquire
collect gather harvest send receive transfer move copy run stop terminate
spawn abuse affect aim allow announce appear apply arrive ask assess assign
become believe block capture carry cause check claim click close compile
confirm consider contain continue copy cover credit decide defend demand
demonstrate deny depend describe design disclose disguise drive embed emerge
enable encode expand expect expose extract fail focus follow force gain
generate grant handle happen help host hunt impact implement improve include
increase infiltrate inform initiate intend intercept introduce issue join keep
lead leak learn leave limit list load lock log look lure manage mention mimic
need note notify open own pack parse pass perform persist pivot plan point
possess prevent probe process produce prompt propagate protect prove provide
pull push reach record recover redirect register release rely remain rename
replace request require resolve respond restore result retrieve return reveal
review rotate route save search secure seek seem sell serve set share show
sign signal spoof stage state stay store study submit succeed suggest supply
support suspect tamper test trace trick trigger try tunnel turn uncover
unpack unveil urge validate verify wait want warn watch weaponize wipe work
dump beacon brute sideload masquerade enumerate escalate author say make go
take see come give find tell believe consider expect""".split()

IRREGULAR_VERBS = {
    "say": ("says", "saying", "said"),
    "make": ("makes", "making", "made"),
    "go": ("goes", "going", "went"),
    "take": ("takes", "taking", "took"),
    "see": ("sees", "seeing", "saw"),
    "come": ("comes", "coming", "came"),
    "give": ("gives", "giving", "gave"),
    "find": ("finds", "finding", "found"),
    "tell": ("tells", "telling", "told"),
    "know": ("knows", "knowing", "knew"),
    "write": ("writes", "writing", "wrote"),
    "steal": ("steals", "stealing", "stole"),
    "send": ("sends", "sending", "sent"),
    "build": ("builds", "building", "built"),
    "run": ("runs", "running", "ran"),
    "begin": ("begins", "beginning", "began"),
    "leave": ("leaves", "leaving", "left"),
    "keep": ("keeps", "keeping", "kept"),
    "hold": ("holds", "holding", "held"),
    "bring": ("brings", "bringing", "brought"),
    "think": ("thinks", "thinking", "thought"),
    "buy": ("buys", "buying", "bought"),
    "catch": ("catches", "catching", "caught"),
    "teach": ("teaches", "teaching", "taught"),
    "sell": ("sells", "selling", "sold"),
    "meet": ("meets", "meeting", "met"),
    "lead": ("leads", "leading", "led"),
    "feel": ("feels", "feeling", "felt"),
    "hit": ("hits", "hitting", "hit"),
    "set": ("sets", "setting", "set"),
    "put": ("puts", "putting", "put"),
    "read": ("reads", "reading", "read"),
    "strike": ("strikes", "striking", "struck"),
    "spread": ("spreads", "spreading", "spread"),
    "become": ("becomes", "becoming", "became"),
    "get": ("gets", "getting", "got"),
    "grow": ("grows", "growing", "grew"),
    "rise": ("rises", "rising", "rose"),
    "fall": ("falls", "falling", "fell"),
    "drive": ("drives", "driving", "drove"),
    "hide": ("hides", "hiding", "hid"),
}

EXTRA_PAST_PARTICIPLES = {
    "written": "write", "stolen": "steal", "taken": "take", "given": "give",
    "known": "know", "seen": "see", "gone": "go", "done": "do", "begun": "begin",
    "driven": "drive", "hidden": "hide", "grown": "grow", "risen": "rise",
    "fallen": "fall", "become": "become", "gotten": "get", "struck": "strike",
}

# base form is more often nominal in report prose; -s/-ed/-ing stay verbal
DUAL = """attack target report exploit drop launch scan control command access
compromise breach leak patch link monitor track name call base start impact
damage release request search share sign test trace trigger process dump
beacon update hunt""".split()

NOUNS = """malware backdoor trojan ransomware virus worm rootkit botnet spyware
adware keylogger stealer wiper group actor gang crew team tool toolkit utility
framework campaign operation researcher analyst company organization
government agency ministry sector industry victim vendor firm bank hospital
university report bulletin advisory blog post article security threat
intelligence vulnerability flaw bug weakness server domain address email
website page file document archive attachment macro network system computer
host machine workstation endpoint device router firewall user administrator
password credential account token certificate data information database
technique tactic procedure capability infrastructure payload dropper loader
implant agent sample variant family version build code script binary
executable library driver module plugin registry key value entry process
service task job persistence privilege escalation movement reconnaissance
phishing spearphishing spear wave incident intrusion infection espionage
sabotage surveillance defender attacker adversary operator developer nation
state country region continent city port protocol channel connection session
traffic packet request response proxy gateway mirror repository source
destination timestamp indicator hash signature rule pattern alert detection
response mitigation remediation defense offense risk impact damage loss cost
summary overview analysis finding conclusion recommendation appendix table
figure section chapter page author title date year month week day time hour
minute part end beginning middle way thing man woman person people child
world life hand eye place work week case point number fact home water room
mother area money story month lot right study book word business issue side
kind head house friend father power play spring summer autumn winter half
member law car city community name team minute idea body back level office
door health art war history result change morning reason girl guy moment air
teacher force education foot boy age policy everything love process music
market sense nation plan college interest death experience effect""".split()

ADJ = """new novel malicious suspicious sophisticated advanced persistent
stealthy unknown known recent previous early late large small major minor
critical severe high low multiple several various numerous single double
common rare unique similar different difficult easy simple complex possible
impossible likely unlikely public private internal external active inactive
remote local global regional national international foreign domestic initial
final additional further technical financial political military industrial
commercial legitimate fraudulent fake genuine successful unsuccessful
effective ineffective dangerous harmful vulnerable secure insecure encrypted
unencrypted hidden visible long short good bad great big old young able full
empty open closed free busy ready clear dark light hard soft strong weak
wide broad deep shallow same other next last first second third important
significant notable prominent prolific infamous notorious separate distinct
compromised infected affected targeted unpatched patched""".split()

NATIONALITIES = """russian chinese american british german french italian
spanish dutch swedish norwegian danish finnish polish czech ukrainian
belarusian romanian bulgarian hungarian austrian swiss belgian portuguese
greek turkish israeli iranian iraqi syrian lebanese saudi emirati qatari
egyptian libyan algerian moroccan tunisian indian pakistani bangladeshi
nepali chinese japanese korean vietnamese thai malaysian indonesian
filipino australian canadian mexican brazilian argentine chilean colombian
venezuelan peruvian cuban""".split()

COUNTRIES = """russia china ukraine iran iraq syria israel turkey egypt libya
india pakistan japan korea vietnam thailand malaysia indonesia australia
canada mexico brazil argentina chile colombia venezuela peru cuba germany
france italy spain portugal greece poland hungary romania bulgaria austria
switzerland belgium netherlands sweden norway denmark finland belarus
america england britain scotland wales ireland europe asia africa
australasia antarctica washington moscow beijing kyiv tehran london paris
berlin rome madrid warsaw""".split()


def conjugate(stem: str) -> tuple[str, str, str]:
    """(3sg, gerund, past) for a regular verb stem."""
    if stem in IRREGULAR_VERBS:
        return IRREGULAR_VERBS[stem]
    vowels = "aeiou"
    if stem.endswith(("s", "x", "z", "ch", "sh")):
        s3 = stem + "es"
    elif stem.endswith("y") and stem[-2] not in vowels:
        s3 = stem[:-1] + "ies"
    else:
        s3 = stem + "s"
    if stem.endswith("e") and not stem.endswith(("ee", "ye", "oe")):
        ger, past = stem[:-1] + "ing", stem + "d"
    elif stem.endswith("y") and stem[-2] not in vowels:
        ger, past = stem + "ing", stem[:-1] + "ied"
    elif (len(stem) >= 3 and stem[-1] not in vowels + "wxy"
          and stem[-2] in vowels and stem[-3] not in vowels and len(stem) <= 5):
        ger, past = stem + stem[-1] + "ing", stem + stem[-1] + "ed"
    else:
        ger, past = stem + "ing", stem + "ed"
    return s3, ger, past


def pluralize(noun: str) -> str:
    vowels = "aeiou"
    if noun.endswith(("s", "x", "z", "ch", "sh")):
        return noun + "es"
    if noun.endswith("y") and noun[-2] not in vowels:
        return noun[:-1] + "ies"
    return noun + "s"


def main() -> None:
    entries: dict[str, tuple[str, str]] = {}

    def put(word: str, pos: str, lemma: str | None = None, overwrite: bool = False):
        word = word.strip().lower()
        if not word:
            return
        if word in entries and not overwrite:
            return
        entries[word] = (pos, lemma or word)

    # closed classes first: they win over any open-class homographs
    for w in DET:
        put(w, "DET")
    for w in PRON:
        put(w, "PRON")
    for w in ADP:
        put(w, "ADP")
    for w in AUX:
        lemma = {"am": "be", "is": "be", "are": "be", "was": "be", "were": "be",
                 "been": "be", "being": "be", "has": "have", "had": "have",
                 "having": "have", "does": "do", "did": "do"}.get(w, w)
        put(w, "AUX", lemma)
    for w in CCONJ:
        put(w, "CCONJ")
    for w in PART:
        put(w, "PART")
    for w in ADV:
        put(w, "ADV")
    for w in NUM:
        put(w, "NUM")

    dual = set(DUAL)
    for stem in sorted(set(VERBS)):
        s3, ger, past = conjugate(stem)
        if stem not in dual:
            put(stem, "VERB", stem)
        put(s3, "VERB", stem)
        put(ger, "VERB", stem)
        put(past, "VERB", stem)
    for form, stem in EXTRA_PAST_PARTICIPLES.items():
        put(form, "VERB", stem)

    for noun in sorted(set(NOUNS) | dual):
        put(noun, "NOUN", noun)
        put(pluralize(noun), "NOUN", noun)

    for adj in sorted(set(ADJ) | set(NATIONALITIES)):
        put(adj, "ADJ", adj)

    for c in sorted(set(COUNTRIES)):
        put(c, "PROPN", c, overwrite=False)

    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / "pos_lexicon.tsv", "w", encoding="utf-8") as fh:
        fh.write("# word\tpos\tlemma\n")
        for word in sorted(entries):
            pos, lemma = entries[word]
            fh.write(f"{word}\t{pos}\t{lemma}\n")

    exceptions = {
        "is": "be", "are": "be", "was": "be", "were": "be", "been": "be",
        "being": "be", "am": "be", "has": "have", "had": "have",
        "does": "do", "did": "do", "used": "use", "uses": "use",
        "men": "man", "women": "woman", "people": "person", "children": "child",
        "mice": "mouse", "feet": "foot", "teeth": "tooth", "data": "data",
        "media": "media", "criteria": "criterion", "analyses": "analysis",
    }
    for stem, (s3, ger, past) in IRREGULAR_VERBS.items():
        exceptions.setdefault(past, stem)
    for form, stem in EXTRA_PAST_PARTICIPLES.items():
        exceptions.setdefault(form, stem)
    with open(OUT / "lemma_exceptions.tsv", "w", encoding="utf-8") as fh:
        fh.write("# form\tlemma\n")
        for form in sorted(exceptions):
            fh.write(f"{form}\t{exceptions[form]}\n")

    print(f"wrote {len(entries)} lexicon entries, {len(exceptions)} lemma exceptions")


if __name__ == "__main__":
    main()
