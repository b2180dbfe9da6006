"""Multi-view dataset loading, synthesis, and normalization.

A multi-view dataset is a list of per-view feature matrices that share the
same row order (one row per sample) plus an optional ground-truth label
vector. Datasets are immutable after construction so that concurrent solver
runs can share them read-only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DatasetError(ValueError):
    """Raised when dataset contents violate structural requirements."""


NORMALIZATION_MODES = ("none", "unit_row_norm", "zscore_columns")


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float) if arr.dtype != np.float64 else arr.copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class MultiViewDataset:
    """Per-view feature matrices (n x d_i each) with optional 0-based labels."""

    views: list[np.ndarray]
    labels: np.ndarray | None = None
    view_names: list[str] | None = None

    def __post_init__(self):
        if not self.views:
            raise DatasetError("dataset needs at least one view")
        views = []
        for idx, view in enumerate(self.views):
            arr = np.asarray(view, dtype=float)
            if arr.ndim != 2:
                raise DatasetError(f"view {idx} is not a 2-D matrix")
            if arr.shape[1] < 1:
                raise DatasetError(f"view {idx} has no feature columns")
            if not np.all(np.isfinite(arr)):
                raise DatasetError(f"view {idx} contains NaN or Inf entries")
            views.append(_freeze(arr))
        n = views[0].shape[0]
        if n < 2:
            raise DatasetError("dataset needs at least two samples")
        for idx, view in enumerate(views):
            if view.shape[0] != n:
                raise DatasetError(
                    f"row-count mismatch: view 0 has {n} rows, view {idx} has {view.shape[0]}"
                )
        object.__setattr__(self, "views", views)
        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.ndim != 1 or labels.shape[0] != n:
                raise DatasetError(
                    f"labels length {labels.shape[0] if labels.ndim == 1 else labels.shape} "
                    f"does not match sample count {n}"
                )
            if not np.issubdtype(labels.dtype, np.integer):
                if not np.all(labels == labels.astype(int)):
                    raise DatasetError("labels must be integers")
            labels = labels.astype(int)
            if labels.min() < 0:
                raise DatasetError("labels must be 0-based class ids")
            present = np.unique(labels)
            expected = np.arange(labels.max() + 1)
            if not np.array_equal(present, expected):
                missing = sorted(set(expected) - set(present))
                raise DatasetError(f"class ids {missing} never appear in labels")
            labels = labels.copy()
            labels.flags.writeable = False
            object.__setattr__(self, "labels", labels)
        if self.view_names is not None and len(self.view_names) != len(views):
            raise DatasetError("view_names length does not match view count")

    @property
    def n_samples(self) -> int:
        return self.views[0].shape[0]

    @property
    def n_views(self) -> int:
        return len(self.views)

    @property
    def n_classes(self) -> int | None:
        if self.labels is None:
            return None
        return int(self.labels.max()) + 1


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of a union-of-subspaces synthetic multi-view dataset."""

    k: int
    n_per_cluster: int
    subspace_dim: int
    view_dims: tuple[int, ...]
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "view_dims", tuple(int(d) for d in self.view_dims))
        if self.k < 2:
            raise DatasetError("need at least two clusters")
        if self.n_per_cluster < 1:
            raise DatasetError("need at least one sample per cluster")
        if self.subspace_dim < 1:
            raise DatasetError("subspace dimension must be positive")
        if not self.view_dims:
            raise DatasetError("need at least one view dimension")
        if any(d <= self.subspace_dim for d in self.view_dims):
            raise DatasetError("each view dimension must exceed the subspace dimension")
        if self.noise_sigma < 0:
            raise DatasetError("noise sigma must be nonnegative")


def generate_synthetic(spec: SyntheticSpec) -> MultiViewDataset:
    """Sample a union-of-subspaces dataset, one random subspace per cluster per view.

    Cluster j in each view occupies a random `subspace_dim`-dimensional linear
    subspace (orthonormal basis from the QR of a Gaussian matrix); samples are
    uniform [-1, 1] mixtures of the basis plus isotropic Gaussian noise.
    Deterministic for a fixed spec, including its seed.
    """
    rng = np.random.default_rng(spec.seed)
    views = []
    for dim in spec.view_dims:
        blocks = []
        for _ in range(spec.k):
            basis, _ = np.linalg.qr(rng.standard_normal((dim, spec.subspace_dim)))
            coeffs = rng.uniform(-1.0, 1.0, size=(spec.n_per_cluster, spec.subspace_dim))
            noise = spec.noise_sigma * rng.standard_normal((spec.n_per_cluster, dim))
            blocks.append(coeffs @ basis.T + noise)
        views.append(np.vstack(blocks))
    labels = np.repeat(np.arange(spec.k), spec.n_per_cluster)
    return MultiViewDataset(views=views, labels=labels)


def _read_matrix_csv(path: Path, has_header: bool) -> np.ndarray:
    if not path.is_file():
        raise DatasetError(f"file not found: {path}")
    rows = []
    width = None
    with path.open("r", encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    if has_header:
        lines = lines[1:]
    for row_idx, line in enumerate(lines):
        if not line.strip():
            continue
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise DatasetError(
                f"ragged rows in {path}: row {row_idx} has {len(cells)} cells, expected {width}"
            )
        parsed = []
        for col_idx, cell in enumerate(cells):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise DatasetError(
                    f"non-numeric cell {cell!r} at {path} row {row_idx}, column {col_idx}"
                ) from None
        rows.append(parsed)
    if not rows:
        raise DatasetError(f"empty matrix file: {path}")
    return np.asarray(rows, dtype=float)


def _read_labels_csv(path: Path) -> np.ndarray:
    if not path.is_file():
        raise DatasetError(f"file not found: {path}")
    values = []
    with path.open("r", encoding="utf-8") as handle:
        for row_idx, line in enumerate(handle.read().splitlines()):
            if not line.strip():
                continue
            try:
                values.append(int(line.strip()))
            except ValueError:
                raise DatasetError(
                    f"non-integer label {line.strip()!r} at {path} row {row_idx}"
                ) from None
    return np.asarray(values, dtype=int)


def load_dataset(manifest_path: str | Path) -> MultiViewDataset:
    """Load a dataset described by a JSON manifest.

    The manifest is an object ``{"views": [{"path": str, "has_header": bool}],
    "labels": str|null, "name": str}``; file paths are resolved relative to the
    manifest's directory. Each view CSV holds one sample per row, the optional
    labels CSV one integer per row.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise DatasetError(f"manifest not found: {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DatasetError(f"invalid manifest JSON: {exc}") from None
    if "views" not in manifest or not manifest["views"]:
        raise DatasetError("manifest lists no views")
    base = manifest_path.parent
    views = []
    names = []
    for entry in manifest["views"]:
        path = base / entry["path"]
        views.append(_read_matrix_csv(path, bool(entry.get("has_header", False))))
        names.append(entry["path"])
    labels = None
    if manifest.get("labels"):
        labels = _read_labels_csv(base / manifest["labels"])
    return MultiViewDataset(views=views, labels=labels, view_names=names)


def write_dataset(ds: MultiViewDataset, out_dir: str | Path, name: str = "dataset") -> Path:
    """Write a dataset as per-view CSVs plus a manifest; returns the manifest path.

    Floats are written with 17 significant digits so that a write/load round
    trip reproduces the matrices exactly.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for idx, view in enumerate(ds.views):
        fname = f"view_{idx}.csv"
        np.savetxt(out_dir / fname, view, fmt="%.17g", delimiter=",")
        entries.append({"path": fname, "has_header": False})
    manifest = {"views": entries, "labels": None, "name": name}
    if ds.labels is not None:
        np.savetxt(out_dir / "labels.csv", ds.labels, fmt="%d")
        manifest["labels"] = "labels.csv"
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")
    return manifest_path


def normalize_views(ds: MultiViewDataset, mode: str = "none") -> MultiViewDataset:
    """Return a dataset with per-view feature normalization applied.

    ``none`` returns the input unchanged. ``unit_row_norm`` scales every
    sample row to unit L2 norm (zero rows are left zero). ``zscore_columns``
    centers each feature column and divides by its population standard
    deviation (zero-variance columns are centered only).
    """
    if mode not in NORMALIZATION_MODES:
        raise DatasetError(f"unknown normalization mode {mode!r}")
    if mode == "none":
        return ds
    views = []
    for view in ds.views:
        out = view.copy()
        if mode == "unit_row_norm":
            norms = np.linalg.norm(out, axis=1)
            scale = np.where(norms > 0, norms, 1.0)
            out = out / scale[:, None]
        else:
            out = out - out.mean(axis=0)
            std = out.std(axis=0)  # population convention (divide by n)
            out = out / np.where(std > 0, std, 1.0)
        views.append(out)
    return MultiViewDataset(views=views, labels=ds.labels, view_names=ds.view_names)
