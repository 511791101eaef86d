from __future__ import annotations

import csv
import json
import os
import pathlib
import re
import typing as t

import typing_extensions as te

import pydantic as pyd

from codbench.exceptions import DataIOError
from codbench.exceptions import ValidationError
from codbench.helper.mixin import LoggingMixin
from codbench.lib import imageio
from codbench.utils import file_stem
from codbench.valueobj import BaseValueObject

ATTRIBUTES = ("MO", "BO", "SO", "OV", "OC", "SC", "IB")
UNKNOWN_CLASS = "other"

# (image dir, mask dir) pairs, first match wins
LAYOUTS = (
    ("Imgs", "GT"),
    ("Image", "GT_Object"),
    ("images", "masks"),
)
ANNOTATION_FILES = ("attributes.csv", "attributes.json")

_COD10K_NAME = re.compile(r"^COD10K-(?:CAM|NonCAM)-\d+-(?P<super>[A-Za-z]+)-\d+-(?P<sub>[A-Za-z]+)-\d+$")


def parse_class_labels(name: str) -> tuple[str, str]:
    """Super- and sub-class carried by a COD10K-style file name.

    Example:
        ```python
        parse_class_labels("COD10K-CAM-3-Flying-53-Bird-3024.jpg")
        # ("Flying", "Bird")
        parse_class_labels("camourflage_00012")
        # ("other", "other")
        ```
    """
    match = _COD10K_NAME.match(file_stem(name))
    if match is None:
        return UNKNOWN_CLASS, UNKNOWN_CLASS
    return match["super"], match["sub"]


class ManifestRecord(BaseValueObject):
    """One image/mask pair with its labels.

    Attributes:
        name: Matching key, the extension-less file name.
        image: RGB image path; None for mask-only datasets.
        mask: Binary ground-truth path.
        super_class: Super-class label, `other` when unknown.
        sub_class: Sub-class label, `other` when unknown.
        attributes: Annotated attribute flags (subset of ATTRIBUTES).
    """

    name: str = pyd.Field(min_length=1)
    image: pathlib.Path | None = None
    mask: pathlib.Path
    super_class: str = UNKNOWN_CLASS
    sub_class: str = UNKNOWN_CLASS
    attributes: dict[str, bool] = pyd.Field(default_factory=dict)

    @pyd.field_validator("attributes")
    @classmethod
    def _known_attributes(cls, v: dict[str, bool]) -> dict[str, bool]:
        unknown = sorted(set(v) - set(ATTRIBUTES))
        if unknown:
            raise ValueError(f"unknown attribute flags {unknown}, expected a subset of {list(ATTRIBUTES)}")
        return v

    @pyd.model_validator(mode="after")
    def _sub_implies_super(self) -> te.Self:
        if self.sub_class != UNKNOWN_CLASS and self.super_class == UNKNOWN_CLASS:
            # raised directly: after-validators run outside the base re-raise
            raise ValidationError(reason=f"record {self.name}: sub-class {self.sub_class!r} without a super-class")
        return self


class DatasetManifest(BaseValueObject):
    name: str
    root: pathlib.Path | None = None
    records: tuple[ManifestRecord, ...] = ()

    def __len__(self) -> int:
        return len(self.records)

    @property
    def is_empty(self) -> bool:
        return not self.records

    def by_name(self) -> dict[str, ManifestRecord]:
        return {r.name: r for r in self.records}

    def ordered(self) -> tuple[ManifestRecord, ...]:
        """Records in name order; every reduction walks this order."""
        return tuple(sorted(self.records, key=lambda r: r.name))


class ManifestLoader(LoggingMixin):
    """Build manifests from dataset directories or explicit CSV/JSON
    manifest files.

    Directory layouts recognised: `Imgs/` + `GT/` (COD10K, CAMO),
    `Image/` + `GT_Object/` (COD10K release layout) and `images/` +
    `masks/`. A mask directory on its own is also accepted. Optional
    `attributes.csv` or `attributes.json` next to them supplies annotated
    flags (OC and SC cannot be computed).

    Manifest CSV columns: `image`, `mask` (required), `name`,
    `super_class`, `sub_class` and one optional 0/1 column per attribute
    flag. Relative paths resolve against the manifest's directory.

    Manifest JSON: `{"name": ..., "records": [{...}]}` with the same keys
    per record, attributes as a `{"MO": true}` mapping.
    """

    __logtag__ = "codbench.lib.dataset.manifest"

    def __init__(self, *, check_dims: bool = True) -> None:
        super().__init__()
        self.check_dims = check_dims

    def load(self, source: str | os.PathLike[str], *, name: str | None = None) -> DatasetManifest:
        """Load a manifest.

        Args:
            source: Dataset root directory or manifest file.
            name: Dataset name; defaults to the directory or file stem.

        Returns:
            The manifest; empty (with a warning) for an empty directory.

        Raises:
            DataIOError: When the source does not exist or cannot be read.
            ValidationError: On malformed rows or image/mask size mismatch.
        """
        path = pathlib.Path(source)
        if path.is_dir():
            manifest = self._from_directory(path, name or path.name)
        elif path.is_file():
            suffix = path.suffix.lower()
            if suffix == ".csv":
                manifest = self._from_csv(path, name or path.stem)
            elif suffix == ".json":
                manifest = self._from_json(path, name)
            else:
                raise DataIOError(path=str(path), reason="manifest files must be .csv or .json")
        else:
            raise DataIOError(path=str(path), reason="no such file or directory")

        if manifest.is_empty:
            self.logger.warning(f"Dataset {manifest.name} at {path} holds no image/mask pairs")
        else:
            self.logger.info(f"Loaded {len(manifest)} records of dataset {manifest.name}")
        if self.check_dims:
            for record in manifest.records:
                check_dimensions(record)
        return manifest

    # ============================================================================
    # Directory layouts
    # ============================================================================

    def _from_directory(self, root: pathlib.Path, name: str) -> DatasetManifest:
        image_dir, mask_dir = self._layout(root)
        if mask_dir is None:
            return DatasetManifest(name=name, root=root)

        images = {file_stem(p): p for p in _image_files(image_dir)} if image_dir else {}
        annotations = self._annotations(root)
        records = []
        for mask in _image_files(mask_dir):
            stem = file_stem(mask)
            image = images.get(stem)
            if image_dir is not None and image is None:
                self.logger.warning(f"No image for mask {mask.name} in {image_dir}")
            super_class, sub_class = parse_class_labels(stem)
            records.append(
                ManifestRecord(
                    name=stem,
                    image=image,
                    mask=mask,
                    super_class=super_class,
                    sub_class=sub_class,
                    attributes=annotations.get(stem, {}),
                )
            )
        return DatasetManifest(name=name, root=root, records=tuple(records))

    def _layout(self, root: pathlib.Path) -> tuple[pathlib.Path | None, pathlib.Path | None]:
        for images, masks in LAYOUTS:
            if (root / masks).is_dir():
                image_dir = root / images
                return (image_dir if image_dir.is_dir() else None), root / masks
        if any(_image_files(root)):
            # a bare directory of masks
            return None, root
        return None, None

    def _annotations(self, root: pathlib.Path) -> dict[str, dict[str, bool]]:
        for fname in ANNOTATION_FILES:
            path = root / fname
            if not path.is_file():
                continue
            self.logger.debug(f"Reading annotated attributes from {path}")
            if path.suffix == ".json":
                data = _read_json(path)
                if not isinstance(data, dict):
                    raise ValidationError(reason=f"{path}: expected an object keyed by image name")
                return {file_stem(k): {f: bool(v) for f, v in flags.items()} for k, flags in data.items()}
            return {file_stem(row["name"]): _row_flags(row, path) for row in _read_csv(path)}
        return {}

    # ============================================================================
    # Explicit manifests
    # ============================================================================

    def _from_csv(self, path: pathlib.Path, name: str) -> DatasetManifest:
        base = path.parent
        records = []
        for lineno, row in enumerate(_read_csv(path), start=2):
            if not row.get("mask"):
                raise ValidationError(reason=f"{path}:{lineno}: the mask column is required")
            records.append(self._record(row, base, where=f"{path}:{lineno}", flags=_row_flags(row, path)))
        return DatasetManifest(name=name, root=base, records=tuple(records))

    def _from_json(self, path: pathlib.Path, name: str | None) -> DatasetManifest:
        data = _read_json(path)
        if isinstance(data, list):
            data = {"records": data}
        if not isinstance(data, dict) or not isinstance(data.get("records", []), list):
            raise ValidationError(reason=f"{path}: expected {{'name': ..., 'records': [...]}}")
        base = path.parent
        records = [
            self._record(row, base, where=f"{path}#{i}", flags=dict(row.get("attributes") or {}))
            for i, row in enumerate(data.get("records", []))
        ]
        return DatasetManifest(name=name or data.get("name") or path.stem, root=base, records=tuple(records))

    @staticmethod
    def _record(row: t.Mapping[str, t.Any], base: pathlib.Path, *, where: str, flags: dict[str, bool]) -> ManifestRecord:
        if not row.get("mask"):
            raise ValidationError(reason=f"{where}: the mask field is required")
        mask = _resolve(base, row["mask"])
        image = _resolve(base, row["image"]) if row.get("image") else None
        name = row.get("name") or file_stem(image or mask)
        parsed = parse_class_labels(name)
        return ManifestRecord(
            name=name,
            image=image,
            mask=mask,
            super_class=row.get("super_class") or parsed[0],
            sub_class=row.get("sub_class") or parsed[1],
            attributes=flags,
        )


def check_dimensions(record: ManifestRecord) -> tuple[int, int]:
    """Size of the record's mask, checked against its image.

    Raises:
        DataIOError: When a file is missing or unreadable.
        ValidationError: When image and mask sizes differ.
    """
    size = imageio.image_size(record.mask)
    if record.image is not None:
        image_size = imageio.image_size(record.image)
        if image_size != size:
            raise ValidationError(
                reason=f"{record.name}: image is {image_size[0]}x{image_size[1]} but mask is {size[0]}x{size[1]}"
            )
    return size


def load_manifest(
    source: str | os.PathLike[str],
    *,
    name: str | None = None,
    check_dims: bool = True,
) -> DatasetManifest:
    return ManifestLoader(check_dims=check_dims).load(source, name=name)


def _image_files(directory: pathlib.Path) -> list[pathlib.Path]:
    return sorted(p for p in directory.iterdir() if p.is_file() and imageio.is_image_file(p))


def _resolve(base: pathlib.Path, value: str) -> pathlib.Path:
    path = pathlib.Path(value)
    return path if path.is_absolute() else base / path


def _read_csv(path: pathlib.Path) -> list[dict[str, str]]:
    try:
        with path.open(newline="", encoding="utf-8") as f:
            return [{k.strip(): (v or "").strip() for k, v in row.items() if k} for row in csv.DictReader(f)]
    except (OSError, UnicodeDecodeError) as e:
        raise DataIOError(path=str(path), reason=str(e)) from e


def _read_json(path: pathlib.Path) -> t.Any:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError) as e:
        raise DataIOError(path=str(path), reason=str(e)) from e
    except json.JSONDecodeError as e:
        raise ValidationError(reason=f"{path}: invalid JSON: {e}") from e


def _row_flags(row: t.Mapping[str, str], path: pathlib.Path) -> dict[str, bool]:
    flags = {}
    for flag in ATTRIBUTES:
        value = row.get(flag, "")
        if value == "":
            continue
        if value not in {"0", "1"}:
            raise ValidationError(reason=f"{path}: attribute {flag} must be 0, 1 or empty, got {value!r}")
        flags[flag] = value == "1"
    return flags
