"""Knowledge base of named STIX entities with aliases.

Storage is two append-friendly JSON-Lines files (``kb.jsonl`` for entities,
``candidates.jsonl`` for the review queue; status changes append a new line
and the loader keeps the last one per id). All mutations go through one
writer object; matching code only ever sees immutable snapshots compiled by
:meth:`KnowledgeBase.snapshot`.
"""

from __future__ import annotations

import csv
import json
import threading
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

from .automaton import Automaton, fold

SDO_TYPES = frozenset({
    "attack-pattern", "campaign", "course-of-action", "grouping", "identity",
    "indicator", "infrastructure", "intrusion-set", "location", "malware",
    "malware-analysis", "note", "observed-data", "opinion", "report",
    "threat-actor", "tool", "vulnerability",
})
KB_TYPES = SDO_TYPES | {"x-mitre-tactic"}

_NAMESPACE = uuid.UUID("6ba7b811-9dad-11d1-80b4-00c04fd430c8")


class IngestError(ValueError):
    pass


class UnknownCandidate(KeyError):
    pass


class AlreadyDecided(ValueError):
    pass


def default_pos_table(path: str | None = None) -> dict[str, list[str]]:
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    text = resources.files("stixpipe.data").joinpath("pos_filter_table.json").read_text("utf-8")
    return json.loads(text)


@dataclass(frozen=True)
class KbEntity:
    id: str
    stix_type: str
    name: str
    aliases: tuple[str, ...] = ()
    allowed_pos: tuple[str, ...] = ()
    source: str = "manual"  # manual | attack | locations | novel-accepted
    created: str = ""

    def surfaces(self) -> tuple[str, ...]:
        return (self.name,) + self.aliases


@dataclass(frozen=True)
class CandidateEntity:
    surface: str
    proposed_type: str
    report_id: str
    span: tuple[int, int]
    trigger: str
    status: str = "pending"  # pending | accepted | rejected
    id: str = ""

    def deterministic_id(self) -> str:
        key = f"{self.report_id}|{self.surface}|{self.span[0]}:{self.span[1]}|{self.trigger}"
        return f"cand--{uuid.uuid5(_NAMESPACE, key)}"


@dataclass(frozen=True)
class KbSnapshot:
    version: int
    entities: tuple[KbEntity, ...]
    automaton: Automaton
    alias_index: dict[str, tuple[str, str]]  # folded surface -> (entity id, stix_type)
    stoplist: frozenset[str] = frozenset()

    def entity(self, entity_id: str) -> KbEntity | None:
        for e in self.entities:
            if e.id == entity_id:
                return e
        return None

    def resolve(self, surface: str) -> tuple[str, str] | None:
        return self.alias_index.get(fold(surface))


def entity_id_for(stix_type: str, name: str) -> str:
    return f"kb--{uuid.uuid5(_NAMESPACE, f'{stix_type}|{name}')}"


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


class KnowledgeBase:
    """Mutable entity store with snapshot compilation and a review queue."""

    def __init__(self, path: str | Path | None = None,
                 pos_table_path: str | None = None):
        self._lock = threading.RLock()
        self._entities: dict[str, KbEntity] = {}
        self._surface_owner: dict[str, str] = {}  # folded surface -> entity id
        self._candidates: dict[str, CandidateEntity] = {}
        self._stoplist: set[str] = set()
        self._version = 0
        self._dirty = True
        self._snapshot: KbSnapshot | None = None
        self._dir = Path(path) if path is not None else None
        self._pos_table = default_pos_table(pos_table_path)
        if self._dir is not None:
            self._dir.mkdir(parents=True, exist_ok=True)
            self._load()

    # -- persistence ---------------------------------------------------

    @property
    def _kb_file(self) -> Path:
        return self._dir / "kb.jsonl"

    @property
    def _cand_file(self) -> Path:
        return self._dir / "candidates.jsonl"

    def _load(self) -> None:
        if self._kb_file.exists():
            for line in self._kb_file.read_text("utf-8").splitlines():
                if not line.strip():
                    continue
                rec = json.loads(line)
                ent = KbEntity(
                    id=rec["id"], stix_type=rec["stix_type"], name=rec["name"],
                    aliases=tuple(rec.get("aliases", [])),
                    allowed_pos=tuple(rec.get("allowed_pos", [])),
                    source=rec.get("source", "manual"), created=rec.get("created", ""),
                )
                self._index_entity(ent)
        if self._cand_file.exists():
            for line in self._cand_file.read_text("utf-8").splitlines():
                if not line.strip():
                    continue
                rec = json.loads(line)
                cand = CandidateEntity(
                    surface=rec["surface"], proposed_type=rec["proposed_type"],
                    report_id=rec["report_id"], span=tuple(rec["span"]),
                    trigger=rec["trigger"], status=rec["status"], id=rec["id"],
                )
                self._candidates[cand.id] = cand  # last line per id wins
                if cand.status == "rejected":
                    self._stoplist.add(fold(cand.surface))

    def _append(self, path: Path, record: dict) -> None:
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    def _write_entity(self, ent: KbEntity) -> None:
        if self._dir is None:
            return
        self._append(self._kb_file, {
            "id": ent.id, "stix_type": ent.stix_type, "name": ent.name,
            "aliases": list(ent.aliases), "allowed_pos": list(ent.allowed_pos),
            "source": ent.source, "created": ent.created,
        })

    def _write_candidate(self, cand: CandidateEntity) -> None:
        if self._dir is None:
            return
        self._append(self._cand_file, {
            "id": cand.id, "surface": cand.surface,
            "proposed_type": cand.proposed_type, "report_id": cand.report_id,
            "span": list(cand.span), "trigger": cand.trigger, "status": cand.status,
        })

    # -- entity management ----------------------------------------------

    def _index_entity(self, ent: KbEntity) -> None:
        conflicts = []
        seen: set[str] = set()
        surfaces = []
        for surface in ent.surfaces():
            f = fold(surface)
            if f in seen:
                continue  # name repeated in aliases: harmless
            seen.add(f)
            surfaces.append(surface)
            owner = self._surface_owner.get(f)
            if owner is not None and owner != ent.id:
                conflicts.append((surface, owner))
        if conflicts:
            detail = ", ".join(f"{s!r} already owned by {o}" for s, o in conflicts)
            raise IngestError(f"alias conflict for entity {ent.id} ({ent.name!r}): {detail}")
        for surface in surfaces:
            self._surface_owner[fold(surface)] = ent.id
        self._entities[ent.id] = ent
        self._dirty = True

    def add_entity(self, stix_type: str, name: str, aliases: list[str] | None = None,
                   source: str = "manual", allowed_pos: list[str] | None = None) -> KbEntity:
        if not name:
            raise IngestError("entity name must be nonempty")
        if stix_type not in KB_TYPES:
            raise IngestError(f"unknown STIX type {stix_type!r}")
        aliases = [a for a in (aliases or []) if a and fold(a) != fold(name)]
        # drop case-insensitive duplicates among the aliases themselves
        uniq: list[str] = []
        for a in aliases:
            if fold(a) not in {fold(u) for u in uniq}:
                uniq.append(a)
        if allowed_pos is None:
            allowed_pos = self._pos_table.get(stix_type, [])
        ent = KbEntity(
            id=entity_id_for(stix_type, name), stix_type=stix_type, name=name,
            aliases=tuple(uniq), allowed_pos=tuple(allowed_pos),
            source=source, created=_now(),
        )
        with self._lock:
            self._index_entity(ent)
            self._write_entity(ent)
        return ent

    def entities(self) -> list[KbEntity]:
        with self._lock:
            return sorted(self._entities.values(), key=lambda e: fold(e.name))

    def resolve(self, surface: str) -> KbEntity | None:
        with self._lock:
            owner = self._surface_owner.get(fold(surface))
            return self._entities.get(owner) if owner else None

    # -- ingestion -------------------------------------------------------

    _ATTACK_MAP = {
        "x-mitre-tactic": "x-mitre-tactic",
        "attack-pattern": "attack-pattern",
        "course-of-action": "course-of-action",
        "intrusion-set": "intrusion-set",
        "malware": "malware",
        "tool": "tool",
    }

    def ingest_attack_bundle(self, path: str | Path) -> int:
        """Load entities from a STIX 2.1 bundle export of ATT&CK.

        Tactics, techniques, mitigations, groups and software map onto
        x-mitre-tactic / attack-pattern / course-of-action / intrusion-set /
        malware-or-tool respectively; revoked or deprecated objects are
        skipped. Returns the number of entities added.
        """
        try:
            with open(path, encoding="utf-8") as fh:
                bundle = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise IngestError(f"cannot read bundle: {exc}") from exc
        if not isinstance(bundle, dict) or bundle.get("type") != "bundle":
            raise IngestError("not a STIX bundle (missing type=bundle)")
        staged: list[tuple[str, str, list[str]]] = []
        for obj in bundle.get("objects", []):
            stix_type = self._ATTACK_MAP.get(obj.get("type"))
            if stix_type is None:
                continue
            if obj.get("revoked") or obj.get("x_mitre_deprecated"):
                continue
            name = obj.get("name")
            if not name:
                continue
            aliases = list(obj.get("aliases", [])) + list(obj.get("x_mitre_aliases", []))
            staged.append((stix_type, name, aliases))
        with self._lock:
            self._check_staged_conflicts(staged)
            for stix_type, name, aliases in staged:
                self.add_entity(stix_type, name, aliases, source="attack")
        return len(staged)

    def _check_staged_conflicts(self, staged: list[tuple[str, str, list[str]]]) -> None:
        """Reject a whole ingestion batch up front so a conflict cannot leave
        the store (and its JSONL files) partially loaded."""
        seen: dict[str, str] = {}
        conflicts: list[str] = []
        for stix_type, name, aliases in staged:
            for surface in [name] + [a for a in aliases if fold(a) != fold(name)]:
                f = fold(surface)
                owner = self._surface_owner.get(f)
                if owner is not None:
                    conflicts.append(f"{surface!r} already owned by {owner}")
                elif f in seen and seen[f] != name:
                    conflicts.append(f"{surface!r} claimed by both {seen[f]!r} and {name!r}")
                else:
                    seen[f] = name
        if conflicts:
            raise IngestError("alias conflicts in bundle: " + "; ".join(sorted(set(conflicts))))

    def ingest_locations_csv(self, path: str | Path) -> int:
        """Load ``name,nationality`` rows as location entities.

        The nationality column may hold several ;-separated adjectives; each
        becomes an alias so locations are found in attributive positions.
        """
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"name", "nationality"} <= set(reader.fieldnames):
                raise IngestError("locations CSV must have columns: name,nationality")
            count = 0
            with self._lock:
                for row in reader:
                    name = (row["name"] or "").strip()
                    if not name:
                        continue
                    aliases = [a.strip() for a in (row["nationality"] or "").split(";") if a.strip()]
                    self.add_entity("location", name, aliases, source="locations")
                    count += 1
        return count

    # -- snapshots ---------------------------------------------------------

    def snapshot(self) -> KbSnapshot:
        """Immutable compiled view; version bumps only when content changed."""
        with self._lock:
            if not self._dirty and self._snapshot is not None:
                return self._snapshot
            alias_index: dict[str, tuple[str, str]] = {}
            automaton = Automaton()
            for ent in self._entities.values():
                for surface in ent.surfaces():
                    f = fold(surface)
                    if f in alias_index:
                        continue
                    alias_index[f] = (ent.id, ent.stix_type)
                    automaton.add(surface, (ent.id, ent.stix_type))
            automaton.build()
            self._version += 1
            self._snapshot = KbSnapshot(
                version=self._version,
                entities=tuple(sorted(self._entities.values(), key=lambda e: e.id)),
                automaton=automaton,
                alias_index=alias_index,
                stoplist=frozenset(self._stoplist),
            )
            self._dirty = False
            return self._snapshot

    # -- candidate queue ---------------------------------------------------

    def add_candidate(self, cand: CandidateEntity) -> CandidateEntity:
        with self._lock:
            cid = cand.id or cand.deterministic_id()
            if cid in self._candidates:
                return self._candidates[cid]
            cand = replace(cand, id=cid, status="pending")
            self._candidates[cid] = cand
            self._write_candidate(cand)
            return cand

    def candidates(self, status: str | None = None) -> list[CandidateEntity]:
        with self._lock:
            out = [c for c in self._candidates.values() if status is None or c.status == status]
            return sorted(out, key=lambda c: (c.report_id, c.span, c.id))

    def stoplist(self) -> frozenset[str]:
        with self._lock:
            return frozenset(self._stoplist)

    def review_candidate(self, candidate_id: str, decision: str,
                         editor_type: str | None = None) -> KbEntity | None:
        """Accept or reject a pending candidate.

        Accepting creates a novel-accepted entity (type overridable); if the
        surface already resolves to a KB entity the existing one is returned
        instead of creating a duplicate. Rejecting stoplists the surface for
        all future novel extraction.
        """
        if decision not in ("accept", "reject"):
            raise ValueError(f"decision must be accept or reject, got {decision!r}")
        with self._lock:
            cand = self._candidates.get(candidate_id)
            if cand is None:
                raise UnknownCandidate(candidate_id)
            if cand.status != "pending":
                raise AlreadyDecided(f"candidate {candidate_id} is {cand.status}")
            if decision == "reject":
                cand = replace(cand, status="rejected")
                self._candidates[candidate_id] = cand
                self._stoplist.add(fold(cand.surface))
                self._write_candidate(cand)
                self._dirty = True
                return None
            cand = replace(cand, status="accepted")
            self._candidates[candidate_id] = cand
            self._write_candidate(cand)
            existing = self.resolve(cand.surface)
            if existing is not None:
                return existing
            stype = editor_type or cand.proposed_type
            return self.add_entity(stype, cand.surface, source="novel-accepted")
