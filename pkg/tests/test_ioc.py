import random

import pytest

from stixpipe.ioc import UnknownIocType, find_iocs, map_ioc_to_stix
from stixpipe.normalize import normalize

# (ioc_type, value) pairs used both here and by the acceptance suite.
IOC_SAMPLES = [
    ("IPv4", "192.168.1.1"),
    ("IPv4", "10.0.0.254"),
    ("IPv4", "8.8.8.8"),
    ("IPv6", "2001:db8::1"),
    ("IPv6", "fe80::1ff:fe23:4567:890a"),
    ("IPv6", "2001:0db8:85a3:0000:0000:8a2e:0370:7334"),
    ("URL", "http://evil.com/path?q=1"),
    ("URL", "https://bad.example.org/a/b.html"),
    ("URL", "ftp://files.evil.net/drop.exe"),
    ("Domain", "evil.com"),
    ("Domain", "c2.bad-domain.net"),
    ("Domain", "update.micros0ft.ru"),
    ("Email", "example@mail.com"),
    ("Email", "admin@evil.com"),
    ("MD5", "e802c6b77dd5842906ed96ab1674c525"),
    ("MD5", "d41d8cd98f00b204e9800998ecf8427e"),
    ("SHA1", "da39a3ee5e6b4b0d3255bfef95601890afd80709"),
    ("SHA256", "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"),
    ("FilePath", "/path/to/file"),
    ("FilePath", "/etc/cron.d/backdoor"),
    ("FilePath", "C:\\Windows\\System32\\evil.dll"),
    ("RegistryKey", "HKEY_LOCAL_MACHINE\\Software\\Microsoft\\Windows\\CurrentVersion\\Run"),
    ("RegistryKey", "HKCU\\Software\\Evil"),
    ("CVE", "CVE-2021-44228"),
    ("CVE", "CVE-1999-0001"),
    ("AttackTechniqueId", "T1518"),
    ("AttackTechniqueId", "T1518.001"),
    ("AttackTechniqueId", "T1059.003"),
    ("Bitcoin", "1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa"),
    ("Bitcoin", "bc1qar0srrr7xfkvy5l643lydnw9re59gtzzwf5mdq"),
]

_FILLER = [
    "the", "actor", "group", "delivered", "payload", "with", "spear",
    "phishing", "emails", "and", "lateral", "movement", "across", "hosts",
    "victims", "were", "seen", "in", "many", "sectors", "during", "spring",
]


def build_corpus(items, seed=0):
    """Embed the given IOCs in filler prose; return (text, ground truth spans)."""
    rng = random.Random(seed)
    parts, truth = [], []
    pos = 0
    for ioc_type, value in items:
        chunk = " ".join(rng.choices(_FILLER, k=rng.randint(2, 6))) + " "
        parts.append(chunk)
        pos += len(chunk)
        parts.append(value)
        truth.append((ioc_type, value, (pos, pos + len(value))))
        pos += len(value)
        parts.append(" ")
        pos += 1
    parts.append(" ".join(rng.choices(_FILLER, k=4)))
    return "".join(parts), truth


def defang(ioc_type, value):
    if ioc_type == "URL":
        return value.replace("http", "hxxp", 1).replace(".", "[.]")
    if ioc_type in ("IPv4", "Domain"):
        return value.replace(".", "[.]")
    if ioc_type == "Email":
        return value.replace("@", "[at]").replace(".", "[.]")
    return value


class TestPaperExamples:
    def find(self, text):
        return find_iocs(normalize(text))

    def test_cve(self):
        (m,) = self.find("Exploited CVE-2021-44228 in the wild")
        assert m.ioc_type == "CVE" and m.stix_type == "vulnerability"
        assert m.value == "CVE-2021-44228"

    def test_md5(self):
        (m,) = self.find("hash e802c6b77dd5842906ed96ab1674c525 observed")
        assert m.ioc_type == "MD5" and m.stix_type == "indicator"

    def test_technique_ids(self):
        ms = self.find("Mapped to T1518 and T1518.001 today")
        assert [(m.ioc_type, m.value) for m in ms] == [
            ("AttackTechniqueId", "T1518"),
            ("AttackTechniqueId", "T1518.001"),
        ]
        assert all(m.stix_type == "attack-pattern" for m in ms)

    def test_bad_ipv4_rejected(self):
        assert self.find("at 999.1.1.1 nothing") == []

    def test_email(self):
        (m,) = self.find("contact example@mail.com now")
        assert m.ioc_type == "Email"

    def test_file_path(self):
        (m,) = self.find("dropped /path/to/file on disk")
        assert m.ioc_type == "FilePath" and m.value == "/path/to/file"


class TestValidationAndOverlap:
    def test_old_cve_year_rejected(self):
        assert find_iocs(normalize("CVE-1998-1234")) == []

    def test_hash_not_inside_longer_hex(self):
        blob = "a" * 96
        assert find_iocs(normalize(blob)) == []

    def test_url_wins_over_domain_and_ip(self):
        ms = find_iocs(normalize("see http://evil.com/x and http://192.168.1.1/y"))
        assert [m.ioc_type for m in ms] == ["URL", "URL"]

    def test_email_wins_over_domain(self):
        (m,) = find_iocs(normalize("write admin@evil.com please"))
        assert m.ioc_type == "Email"

    def test_span_fidelity(self):
        text, _ = build_corpus(IOC_SAMPLES)
        nt = normalize(text)
        for m in find_iocs(nt):
            assert nt.text[m.span[0]:m.span[1]] == m.value

    def test_determinism(self):
        text, _ = build_corpus(IOC_SAMPLES, seed=3)
        nt = normalize(text)
        assert find_iocs(nt) == find_iocs(nt)

    def test_trailing_sentence_period_not_in_url(self):
        (m,) = find_iocs(normalize("Go to http://evil.com/a. Next."))
        assert m.value.endswith("/a")


def test_generator_oracle_precision_recall():
    text, truth = build_corpus(IOC_SAMPLES, seed=11)
    got = find_iocs(normalize(text))
    got_set = {(m.ioc_type, m.value, m.span) for m in got}
    truth_set = set(truth)
    assert got_set == truth_set  # precision == recall == 1.0


def test_refang_composition():
    for ioc_type, value in IOC_SAMPLES:
        direct = find_iocs(normalize(f"seen {value} here"))
        refanged = find_iocs(normalize(f"seen {defang(ioc_type, value)} here"))
        assert [m.value for m in refanged] == [m.value for m in direct], value


def test_map_table():
    assert map_ioc_to_stix("MD5") == "indicator"
    assert map_ioc_to_stix("CVE") == "vulnerability"
    assert map_ioc_to_stix("AttackTechniqueId") == "attack-pattern"
    with pytest.raises(UnknownIocType):
        map_ioc_to_stix("SSDEEP")
