"""On-disk data model for per-video modality bundles.

A corpus is a JSON Lines manifest plus one directory per video holding the
upload-time artifacts: embeddings in a small binary format, per-image
detections as JSON, and caption/transcript as plain text. All loaders are
strict; `validate_bundle` is the non-throwing counterpart that reports every
violated invariant.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

TITLE_DIM = 768
IMAGE_DIM = 2048
HISTOGRAM_BINS = 512

EMB_MAGIC = b"CPDM"
EMB_VERSION = 1
KIND_TITLE = 1
KIND_IMAGE = 2
KIND_FACE = 3

CATEGORY_NAMES = ("misleading", "spam", "false_promise", "exaggerated", "curiosity_gap")

_HEADER = struct.Struct("<4sBBII")


class CorpusError(Exception):
    """Base for manifest/bundle loading failures."""


class ManifestError(CorpusError):
    pass


class BundleError(CorpusError):
    pass


class MissingArtifactError(BundleError):
    pass


class DimensionMismatchError(BundleError):
    pass


class NonFiniteValueError(BundleError):
    pass


@dataclass
class ManifestEntry:
    video_id: str
    title: str
    label: int
    categories: dict[str, bool]
    bundle_dir: Path


@dataclass
class FaceSet:
    """Face embeddings detected in one image; dimension is declared per file."""

    embeddings: np.ndarray  # (count, dim) float32; count may be 0
    count: int

    @property
    def dim(self) -> int:
        return int(self.embeddings.shape[1])


@dataclass
class ObjectSet:
    labels: list[str]
    count: int


@dataclass
class ColorHistogram:
    """8x8x8 RGB quantization as raw pixel counts."""

    bins: np.ndarray  # (512,) float64
    total_pixels: int


@dataclass
class ModalityBundle:
    title: str
    title_embedding: np.ndarray  # (768,) float32
    thumbnail_embedding: np.ndarray  # (2048,) float32
    keyframe_embeddings: np.ndarray  # (K, 2048) float32
    thumbnail_faces: FaceSet
    keyframe_faces: list[FaceSet]
    thumbnail_objects: ObjectSet
    keyframe_objects: list[ObjectSet]
    thumbnail_histogram: ColorHistogram
    keyframe_histograms: list[ColorHistogram]
    caption: str
    transcript: str

    @property
    def keyframe_count(self) -> int:
        return int(self.keyframe_embeddings.shape[0])


@dataclass
class Violation:
    code: str
    message: str


ValidationReport = list


def load_manifest(path: Path | str) -> list[ManifestEntry]:
    """Parse a JSON Lines manifest, rejecting duplicates and bad labels.

    Relative `bundle_dir` values are resolved against the manifest's directory.
    """
    path = Path(path)
    if not path.is_file():
        raise ManifestError(f"manifest not found: {path}")
    base = path.parent
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            try:
                entry = _parse_entry(raw, base)
            except ManifestError as exc:
                raise ManifestError(f"{path}:{lineno}: {exc}") from None
            if entry.video_id in seen:
                raise ManifestError(f"{path}:{lineno}: duplicate video_id {entry.video_id!r}")
            seen.add(entry.video_id)
            entries.append(entry)
    return entries


def _parse_entry(raw: dict, base: Path) -> ManifestEntry:
    for key in ("video_id", "title", "label", "categories", "bundle_dir"):
        if key not in raw:
            raise ManifestError(f"missing field {key!r}")
    label = raw["label"]
    if label not in (0, 1):
        raise ManifestError(f"label must be 0 or 1, got {label!r}")
    cats_raw = raw["categories"]
    categories: dict[str, bool] = {}
    for name in CATEGORY_NAMES:
        value = cats_raw.get(name, False)
        if not isinstance(value, bool):
            raise ManifestError(f"category {name!r} must be boolean, got {value!r}")
        categories[name] = value
    unknown = set(cats_raw) - set(CATEGORY_NAMES)
    if unknown:
        raise ManifestError(f"unknown categories {sorted(unknown)}")
    if label == 0 and any(categories.values()):
        flagged = [n for n, v in categories.items() if v]
        raise ManifestError(f"label=0 entry carries category flags {flagged}")
    bundle_dir = Path(raw["bundle_dir"])
    if not bundle_dir.is_absolute():
        bundle_dir = base / bundle_dir
    return ManifestEntry(
        video_id=str(raw["video_id"]),
        title=str(raw["title"]),
        label=int(label),
        categories=categories,
        bundle_dir=bundle_dir,
    )


def write_manifest(path: Path | str, entries: list[ManifestEntry]) -> None:
    path = Path(path)
    base = path.parent
    lines = []
    for e in entries:
        bundle_dir = e.bundle_dir
        try:
            bundle_dir = bundle_dir.relative_to(base)
        except ValueError:
            pass
        lines.append(
            json.dumps(
                {
                    "video_id": e.video_id,
                    "title": e.title,
                    "label": e.label,
                    "categories": e.categories,
                    "bundle_dir": str(bundle_dir),
                },
                ensure_ascii=False,
                sort_keys=True,
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_embeddings(
    path: Path | str,
    expect_kind: int | None = None,
    expect_dim: int | None = None,
) -> np.ndarray:
    """Read one binary embedding file into a (count, dim) float32 array."""
    path = Path(path)
    if not path.is_file():
        raise MissingArtifactError(f"missing artifact: {path}")
    blob = path.read_bytes()
    if len(blob) < _HEADER.size:
        raise BundleError(f"{path}: truncated header")
    magic, version, kind, dim, count = _HEADER.unpack_from(blob)
    if magic != EMB_MAGIC:
        raise BundleError(f"{path}: bad magic {magic!r}")
    if version != EMB_VERSION:
        raise BundleError(f"{path}: unsupported version {version}")
    if expect_kind is not None and kind != expect_kind:
        raise BundleError(f"{path}: expected kind {expect_kind}, got {kind}")
    if expect_dim is not None and dim != expect_dim:
        raise DimensionMismatchError(f"{path}: expected dim {expect_dim}, got {dim}")
    if dim == 0:
        raise BundleError(f"{path}: zero dimension")
    payload = blob[_HEADER.size :]
    expected_bytes = 4 * dim * count
    if len(payload) != expected_bytes:
        raise BundleError(f"{path}: payload is {len(payload)} bytes, expected {expected_bytes}")
    data = np.frombuffer(payload, dtype="<f4").reshape(count, dim).astype(np.float32)
    if not np.all(np.isfinite(data)):
        raise NonFiniteValueError(f"{path}: non-finite values")
    return data


def write_embeddings(path: Path | str, array: np.ndarray, kind: int) -> None:
    array = np.ascontiguousarray(array, dtype="<f4")
    if array.ndim != 2:
        raise ValueError("embedding array must be 2-D (count, dim)")
    count, dim = array.shape
    header = _HEADER.pack(EMB_MAGIC, EMB_VERSION, kind, dim, count)
    Path(path).write_bytes(header + array.tobytes())


def read_detections(path: Path | str) -> tuple[ObjectSet, ColorHistogram]:
    path = Path(path)
    if not path.is_file():
        raise MissingArtifactError(f"missing artifact: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
        labels = [str(x) for x in raw["objects"]]
        bins = np.asarray(raw["histogram"]["bins"], dtype=np.float64)
        total = int(raw["histogram"]["total_pixels"])
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise BundleError(f"{path}: malformed detections: {exc}") from exc
    if not np.all(np.isfinite(bins)):
        raise NonFiniteValueError(f"{path}: non-finite histogram bins")
    return ObjectSet(labels=labels, count=len(labels)), ColorHistogram(bins=bins, total_pixels=total)


def write_detections(path: Path | str, objects: ObjectSet, histogram: ColorHistogram) -> None:
    bins = [
        int(b) if float(b).is_integer() else float(b)  # keep integer counts readable
        for b in np.asarray(histogram.bins, dtype=np.float64)
    ]
    payload = {
        "objects": list(objects.labels),
        "histogram": {"bins": bins, "total_pixels": int(histogram.total_pixels)},
    }
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def _read_text(path: Path) -> str:
    if not path.is_file():
        raise MissingArtifactError(f"missing artifact: {path}")
    return path.read_text(encoding="utf-8")


def load_bundle(entry: ManifestEntry) -> ModalityBundle:
    """Load and strictly check every artifact under `entry.bundle_dir`."""
    bundle = _load_bundle_raw(entry)
    violations = validate_bundle(bundle)
    if violations:
        first = violations[0]
        raise BundleError(f"{entry.bundle_dir}: invalid bundle: [{first.code}] {first.message}")
    return bundle


def inspect_bundle(entry: ManifestEntry) -> ValidationReport:
    """Non-throwing check: every invariant violation, or the load error when
    the artifacts cannot even be read."""
    try:
        bundle = _load_bundle_raw(entry)
    except CorpusError as exc:
        return [Violation(code="LOAD", message=str(exc))]
    return validate_bundle(bundle)


def _load_bundle_raw(entry: ManifestEntry) -> ModalityBundle:
    d = entry.bundle_dir
    if not d.is_dir():
        raise MissingArtifactError(f"missing bundle directory: {d}")

    title_emb = read_embeddings(d / "title.emb", expect_kind=KIND_TITLE, expect_dim=TITLE_DIM)
    if title_emb.shape[0] != 1:
        raise BundleError(f"{d / 'title.emb'}: expected a single vector, got {title_emb.shape[0]}")
    thumb_emb = read_embeddings(d / "thumbnail.emb", expect_kind=KIND_IMAGE, expect_dim=IMAGE_DIM)
    if thumb_emb.shape[0] != 1:
        raise BundleError(f"{d / 'thumbnail.emb'}: expected a single vector, got {thumb_emb.shape[0]}")
    kf_embs = read_embeddings(d / "keyframes.emb", expect_kind=KIND_IMAGE, expect_dim=IMAGE_DIM)
    k = kf_embs.shape[0]
    if k < 1:
        raise BundleError(f"{d / 'keyframes.emb'}: bundle needs at least one keyframe")

    thumb_faces = _load_faces(d / "faces_thumbnail.emb")
    thumb_objects, thumb_hist = read_detections(d / "detections_thumbnail.json")

    kf_faces, kf_objects, kf_hists = [], [], []
    for i in range(k):
        kf_faces.append(_load_faces(d / f"faces_kf_{i:03d}.emb"))
        objs, hist = read_detections(d / f"detections_kf_{i:03d}.json")
        kf_objects.append(objs)
        kf_hists.append(hist)

    return ModalityBundle(
        title=entry.title,
        title_embedding=title_emb[0],
        thumbnail_embedding=thumb_emb[0],
        keyframe_embeddings=kf_embs,
        thumbnail_faces=thumb_faces,
        keyframe_faces=kf_faces,
        thumbnail_objects=thumb_objects,
        keyframe_objects=kf_objects,
        thumbnail_histogram=thumb_hist,
        keyframe_histograms=kf_hists,
        caption=_read_text(d / "caption.txt"),
        transcript=_read_text(d / "transcript.txt"),
    )


def _load_faces(path: Path) -> FaceSet:
    emb = read_embeddings(path, expect_kind=KIND_FACE)
    return FaceSet(embeddings=emb, count=emb.shape[0])


def save_bundle(bundle_dir: Path | str, bundle: ModalityBundle) -> None:
    """Write every artifact of `bundle`; inverse of `load_bundle`."""
    d = Path(bundle_dir)
    d.mkdir(parents=True, exist_ok=True)
    write_embeddings(d / "title.emb", bundle.title_embedding.reshape(1, -1), KIND_TITLE)
    write_embeddings(d / "thumbnail.emb", bundle.thumbnail_embedding.reshape(1, -1), KIND_IMAGE)
    write_embeddings(d / "keyframes.emb", bundle.keyframe_embeddings, KIND_IMAGE)
    write_embeddings(d / "faces_thumbnail.emb", bundle.thumbnail_faces.embeddings, KIND_FACE)
    write_detections(d / "detections_thumbnail.json", bundle.thumbnail_objects, bundle.thumbnail_histogram)
    for i in range(bundle.keyframe_count):
        write_embeddings(d / f"faces_kf_{i:03d}.emb", bundle.keyframe_faces[i].embeddings, KIND_FACE)
        write_detections(d / f"detections_kf_{i:03d}.json", bundle.keyframe_objects[i], bundle.keyframe_histograms[i])
    (d / "caption.txt").write_text(bundle.caption, encoding="utf-8")
    (d / "transcript.txt").write_text(bundle.transcript, encoding="utf-8")


def validate_bundle(bundle: ModalityBundle) -> ValidationReport:
    """Return one Violation per broken invariant; empty means valid."""
    report: list[Violation] = []

    def check(code: str, ok: bool, message: str) -> None:
        if not ok:
            report.append(Violation(code=code, message=message))

    check(
        "TITLE_DIM",
        bundle.title_embedding.shape == (TITLE_DIM,),
        f"title embedding has shape {bundle.title_embedding.shape}, expected ({TITLE_DIM},)",
    )
    check(
        "IMAGE_DIM",
        bundle.thumbnail_embedding.shape == (IMAGE_DIM,),
        f"thumbnail embedding has shape {bundle.thumbnail_embedding.shape}, expected ({IMAGE_DIM},)",
    )
    k = bundle.keyframe_count
    check("KEYFRAME_COUNT", k >= 1, "bundle has no keyframes")
    check(
        "IMAGE_DIM",
        bundle.keyframe_embeddings.ndim == 2 and bundle.keyframe_embeddings.shape[1] == IMAGE_DIM,
        f"keyframe embeddings have shape {bundle.keyframe_embeddings.shape}, expected (K, {IMAGE_DIM})",
    )
    for name, n in (
        ("faces", len(bundle.keyframe_faces)),
        ("objects", len(bundle.keyframe_objects)),
        ("histograms", len(bundle.keyframe_histograms)),
    ):
        check("LIST_LENGTH", n == k, f"{n} keyframe {name} entries for {k} keyframes")

    for label, arr in (
        ("title embedding", bundle.title_embedding),
        ("thumbnail embedding", bundle.thumbnail_embedding),
        ("keyframe embeddings", bundle.keyframe_embeddings),
    ):
        check("NONFINITE", bool(np.all(np.isfinite(arr))), f"non-finite values in {label}")

    face_dims = set()
    for label, faces in [("thumbnail", bundle.thumbnail_faces)] + [
        (f"keyframe {i}", fs) for i, fs in enumerate(bundle.keyframe_faces)
    ]:
        check(
            "FACE_COUNT",
            faces.count == faces.embeddings.shape[0],
            f"{label} face count {faces.count} != {faces.embeddings.shape[0]} embeddings",
        )
        check("NONFINITE", bool(np.all(np.isfinite(faces.embeddings))), f"non-finite face embeddings in {label}")
        if faces.embeddings.shape[0] > 0:
            face_dims.add(faces.dim)
    check("FACE_DIM", len(face_dims) <= 1, f"face embedding dimensions differ across images: {sorted(face_dims)}")

    for label, objs in [("thumbnail", bundle.thumbnail_objects)] + [
        (f"keyframe {i}", os_) for i, os_ in enumerate(bundle.keyframe_objects)
    ]:
        check(
            "OBJECT_COUNT",
            objs.count == len(objs.labels),
            f"{label} object count {objs.count} != {len(objs.labels)} labels",
        )

    for label, hist in [("thumbnail", bundle.thumbnail_histogram)] + [
        (f"keyframe {i}", h) for i, h in enumerate(bundle.keyframe_histograms)
    ]:
        bins = np.asarray(hist.bins, dtype=np.float64)
        check("HISTOGRAM_BINS", bins.shape == (HISTOGRAM_BINS,), f"{label} histogram has {bins.size} bins")
        if not np.all(np.isfinite(bins)):
            report.append(Violation(code="NONFINITE", message=f"non-finite histogram bins in {label}"))
            continue
        check("HISTOGRAM_NEGATIVE", bool(np.all(bins >= 0)), f"negative histogram bins in {label}")
        check("HISTOGRAM_TOTAL", hist.total_pixels > 0, f"{label} total_pixels must be positive")
        if hist.total_pixels > 0:
            rel = abs(float(bins.sum()) - hist.total_pixels) / hist.total_pixels
            check(
                "HISTOGRAM_SUM",
                rel <= 1e-6 or math.isclose(float(bins.sum()), hist.total_pixels, rel_tol=1e-6),
                f"{label} bins sum to {bins.sum():.6g}, total_pixels={hist.total_pixels}",
            )
    return report
