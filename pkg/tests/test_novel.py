from stixpipe.kb import KnowledgeBase
from stixpipe.lingua import analyze_sentence
from stixpipe.matcher import match_entities
from stixpipe.normalize import normalize, split_sentences, tokenize
from stixpipe.novel import extract_novel


def run(text, kb=None, stoplist=None, existing=None):
    kb = kb or KnowledgeBase()
    snap = kb.snapshot()
    nt = split_sentences(normalize(text))
    graphs = [analyze_sentence(tokenize(nt, span), i) for i, span in enumerate(nt.sentences)]
    existing = existing if existing is not None else match_entities(nt, snap)
    return extract_novel(nt, graphs, existing, snap,
                         stoplist=stoplist, report_id="r1"), nt


class TestFrames:
    def test_dubbed_backdoor(self):
        pairs, _ = run("Analysts found a new backdoor dubbed SUNBURST yesterday.")
        assert len(pairs) == 1
        mention, cand = pairs[0]
        assert mention.surface == "SUNBURST"
        assert mention.stix_type == "malware"
        assert mention.provenance == "novel"
        assert mention.confidence == 0.8
        assert cand.proposed_type == "malware" and cand.status == "pending"

    def test_type_noun_appos(self):
        pairs, _ = run("They deployed the malware Raindrop on hosts.")
        assert [(m.surface, m.stix_type) for m, _ in pairs] == [("Raindrop", "malware")]

    def test_kb_cross_check_suppresses(self):
        kb = KnowledgeBase()
        kb.add_entity("intrusion-set", "APT29")
        pairs, _ = run("They deployed the malware APT29 on hosts.", kb=kb)
        assert pairs == []

    def test_naming_verb(self):
        pairs, _ = run("Researchers named the campaign StellarRoute after analysis.")
        assert [(m.surface, m.stix_type) for m, _ in pairs] == [("StellarRoute", "campaign")]

    def test_tracked_as_group(self):
        pairs, _ = run("The intrusion is tied to an actor tracked as BronzeHalo.")
        assert [(m.surface, m.stix_type) for m, _ in pairs] == [("BronzeHalo", "intrusion-set")]

    def test_multiword_name(self):
        pairs, _ = run("Analysts described the malware Agent Tesla in depth.")
        assert [m.surface for m, _ in pairs] == ["Agent Tesla"]

    def test_stoplist_respected(self):
        pairs, _ = run("They deployed the tool Windows on hosts.",
                       stoplist=frozenset({"windows"}))
        assert pairs == []

    def test_no_trigger_no_candidate(self):
        pairs, _ = run("The group exfiltrated documents overnight.")
        assert pairs == []

    def test_span_points_at_surface(self):
        pairs, nt = run("A wave delivered the ransomware DarkPetal quickly.")
        (mention, cand) = pairs[0]
        s, e = mention.span
        assert nt.text[s:e] == "DarkPetal" == cand.surface


class TestInvariants:
    def test_never_casefolds_to_kb_surface(self):
        kb = KnowledgeBase()
        kb.add_entity("malware", "Raindrop", aliases=["RainDrop2"])
        pairs, _ = run("They studied the malware RAINDROP closely.", kb=kb)
        assert pairs == []

    def test_every_mention_has_candidate(self):
        pairs, _ = run(
            "A backdoor dubbed Alpha spread. Later the malware Bravo appeared.")
        assert len(pairs) == 2
        for mention, cand in pairs:
            assert mention.surface == cand.surface
            assert mention.span == cand.span

    def test_determinism(self):
        a, _ = run("A new worm called IronVine hit banks.")
        b, _ = run("A new worm called IronVine hit banks.")
        assert [(m.surface, m.span, m.stix_type) for m, _ in a] == \
               [(m.surface, m.span, m.stix_type) for m, _ in b]

    def test_no_overlap_with_existing_mentions(self):
        kb = KnowledgeBase()
        kb.add_entity("malware", "Agent Tesla")
        pairs, _ = run("They analyzed the malware Agent Tesla again.", kb=kb)
        assert pairs == []
