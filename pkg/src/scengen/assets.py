"""Tag-to-asset manifest and the placeholder substitution pass.

Scenario entities are authored against primitive placeholder shapes and
carry a tag; when a manifest maps the tag to a real asset the entity is
bound to it, otherwise it keeps its placeholder and a warning is emitted.
The manifest is a UTF-8 TSV file: ``tag<TAB>asset_id<TAB>pack<TAB>display_name``
per row, blank lines and ``#`` comments ignored.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import GridPos, Placeholder, ScenarioDoc


class ManifestError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DuplicateTagError(ManifestError):
    def __init__(self, line: int, tag: str):
        super().__init__(line, f"duplicate tag {tag!r}")
        self.tag = tag


@dataclass(frozen=True)
class AssetEntry:
    tag: str
    asset_id: str
    pack: str
    display_name: str


@dataclass(frozen=True)
class AssetCatalog:
    entries: tuple[AssetEntry, ...]

    def lookup(self, tag: str) -> AssetEntry | None:
        for entry in self.entries:
            if entry.tag == tag:
                return entry
        return None

    def __len__(self) -> int:
        return len(self.entries)


EMPTY_CATALOG = AssetCatalog(entries=())


@dataclass(frozen=True)
class AssetBinding:
    """Resolution of one entity: a catalog asset or its placeholder shape.

    ``display_name`` and ``position`` are carried along so game bundles
    stay self-contained: UI layers can label the entity without the
    catalog file and the runtime can target it on the grid.
    """

    entity: str
    asset_id: str | None  # None means placeholder fallback
    placeholder: Placeholder
    display_name: str
    position: GridPos | None = None

    @property
    def resolved(self) -> str:
        if self.asset_id is not None:
            return f"asset:{self.asset_id}"
        return f"placeholder:{self.placeholder.value}"


def load_manifest(source: str) -> AssetCatalog:
    """Parse manifest text; raises ManifestError with the offending line."""
    entries: list[AssetEntry] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise ManifestError(
                lineno, f"expected 4 tab-separated fields, found {len(fields)}")
        tag, asset_id, pack, display_name = fields
        if not tag:
            raise ManifestError(lineno, "empty tag")
        if not asset_id:
            raise ManifestError(lineno, "empty asset id")
        if tag in seen:
            raise DuplicateTagError(lineno, tag)
        seen.add(tag)
        entries.append(AssetEntry(tag=tag, asset_id=asset_id, pack=pack,
                                  display_name=display_name))
    return AssetCatalog(entries=tuple(entries))


def bind_assets(doc: ScenarioDoc,
                catalog: AssetCatalog) -> tuple[list[AssetBinding], list[str]]:
    """Bind every entity, falling back to its placeholder on a tag miss.

    Total: one binding per entity, ordered by entity name.  Misses are
    reported as warnings, never errors, so a scenario is playable before
    its asset pack exists.
    """
    bindings: list[AssetBinding] = []
    warnings: list[str] = []
    for entity in sorted(doc.entities, key=lambda e: e.name):
        entry = catalog.lookup(entity.tag)
        if entry is None:
            bindings.append(AssetBinding(
                entity=entity.name,
                asset_id=None,
                placeholder=entity.placeholder,
                display_name=entity.name,
                position=entity.position,
            ))
            warnings.append(
                f"entity {entity.name!r}: no asset for tag {entity.tag!r}, "
                f"keeping placeholder {entity.placeholder.value}")
        else:
            bindings.append(AssetBinding(
                entity=entity.name,
                asset_id=entry.asset_id,
                placeholder=entity.placeholder,
                display_name=entry.display_name,
                position=entity.position,
            ))
    return bindings, warnings
