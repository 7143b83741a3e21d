"""Multi-view dataset model: on-disk format, missing-mask construction,
observed-view extraction with implicit index matrices, and a synthetic
generator for controlled experiments.

Directory format
----------------
``manifest.json`` with fields ``{name, n, m, c, dims, view_files,
label_file}``.  Each view file is CSV with one row per sample (n rows of
d_v comma-separated floats); the label file is a CSV of n integers.  A
mask file, when used, is CSV with n rows of m 0/1 entries.  Everything is
UTF-8 with LF line endings and '.' decimals.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "DatasetError",
    "MultiViewDataset",
    "MissingMask",
    "IncompleteView",
    "load_dataset",
    "save_dataset",
    "load_mask",
    "save_mask",
    "apply_missing",
    "build_incomplete_views",
    "normalize_features",
    "make_synthetic",
    "scatter_columns",
    "gather_columns",
]

# full-precision float format, round-trips binary64 exactly
FLOAT_FMT = "%.17g"


class DatasetError(Exception):
    """Malformed dataset directory, dimension mismatch, or infeasible mask."""


@dataclass(eq=False)
class MultiViewDataset:
    """m feature matrices over the same n samples plus ground-truth labels.

    ``views[v]`` has shape (d_v, n): features by samples.  Labels are
    0-based integer cluster ids.
    """

    views: list
    labels: np.ndarray
    name: str = "dataset"

    def __post_init__(self):
        self.views = [np.asarray(v, dtype=np.float64) for v in self.views]
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if not self.views:
            raise DatasetError("dataset needs at least one view")
        n = self.views[0].shape[1]
        if n == 0:
            raise DatasetError("empty dataset")
        for v, x in enumerate(self.views):
            if x.ndim != 2 or x.shape[1] != n:
                raise DatasetError(f"view {v} has shape {x.shape}, expected (*, {n})")
            if not np.isfinite(x).all():
                raise DatasetError(f"view {v} contains non-finite entries")
        if self.labels.shape != (n,):
            raise DatasetError(f"labels have length {self.labels.shape}, expected {n}")
        if np.unique(self.labels).size < 2:
            raise DatasetError("labels must contain at least 2 distinct clusters")

    @property
    def n(self):
        return self.views[0].shape[1]

    @property
    def m(self):
        return len(self.views)

    @property
    def c(self):
        return int(np.unique(self.labels).size)

    @property
    def dims(self):
        return [x.shape[0] for x in self.views]


@dataclass(eq=False)
class MissingMask:
    """Boolean n x m presence matrix: present[j, v] marks sample j observed
    in view v.  Every sample must remain observed in at least one view."""

    present: np.ndarray

    def __post_init__(self):
        self.present = np.asarray(self.present, dtype=bool)
        if self.present.ndim != 2:
            raise DatasetError("mask must be an n x m matrix")
        if not self.present.any(axis=1).all():
            raise DatasetError("mask leaves some sample with zero views")

    @property
    def n(self):
        return self.present.shape[0]

    @property
    def m(self):
        return self.present.shape[1]

    def n_incomplete(self):
        return int((~self.present.all(axis=1)).sum())

    def view_counts(self):
        return self.present.sum(axis=0)


@dataclass(eq=False)
class IncompleteView:
    """Observed part of one view.

    ``x_o`` holds the d_v x n_v observed columns in ascending global sample
    order and ``index`` maps observed position i to its global sample id,
    which makes the 0/1 index matrix implicit.
    """

    x_o: np.ndarray
    index: np.ndarray
    n: int
    present: np.ndarray = field(init=False)

    def __post_init__(self):
        self.x_o = np.asarray(self.x_o, dtype=np.float64)
        self.index = np.asarray(self.index, dtype=np.int64)
        if self.index.ndim != 1 or self.x_o.shape[1] != self.index.size:
            raise DatasetError("index length must match observed column count")
        if self.index.size and (np.diff(self.index) <= 0).any():
            raise DatasetError("index must be strictly increasing")
        self.present = np.zeros(self.n, dtype=bool)
        self.present[self.index] = True

    @property
    def d(self):
        return self.x_o.shape[0]

    @property
    def n_v(self):
        return self.index.size

    def index_matrix(self):
        """Materialize the n_v x n 0/1 selection matrix."""
        a = np.zeros((self.n_v, self.n))
        a[np.arange(self.n_v), self.index] = 1.0
        return a


def scatter_columns(mat, index, n):
    """Place the columns of an observed-order matrix at their global
    positions (right-multiplication by the index matrix)."""
    out = np.zeros((mat.shape[0], n))
    out[:, index] = mat
    return out


def gather_columns(mat, index):
    """Select the observed columns of a global-order matrix
    (right-multiplication by the transposed index matrix)."""
    return mat[:, index]


def load_dataset(path):
    """Load a dataset directory.  View files are stored one row per sample
    and transposed to the internal (d_v, n) layout."""
    path = Path(path)
    manifest_path = path / "manifest.json"
    if not manifest_path.is_file():
        raise DatasetError(f"missing manifest: {manifest_path}")
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    for key in ("n", "m", "dims", "view_files", "label_file"):
        if key not in manifest:
            raise DatasetError(f"manifest missing field '{key}'")
    n, m = int(manifest["n"]), int(manifest["m"])
    if n == 0:
        raise DatasetError("empty dataset")
    dims = [int(d) for d in manifest["dims"]]
    if len(manifest["view_files"]) != m or len(dims) != m:
        raise DatasetError("manifest view count disagrees with dims/view_files")
    views = []
    for v, fname in enumerate(manifest["view_files"]):
        fpath = path / fname
        if not fpath.is_file():
            raise DatasetError(f"missing view file: {fpath}")
        mat = np.loadtxt(fpath, delimiter=",", ndmin=2)
        if mat.shape != (n, dims[v]):
            raise DatasetError(
                f"view file {fname} has shape {mat.shape}, manifest says ({n}, {dims[v]})"
            )
        views.append(mat.T.copy())
    lpath = path / manifest["label_file"]
    if not lpath.is_file():
        raise DatasetError(f"missing label file: {lpath}")
    labels = np.loadtxt(lpath, delimiter=",", dtype=np.int64, ndmin=1)
    if labels.shape != (n,):
        raise DatasetError(f"label file has {labels.shape[0]} entries, manifest says {n}")
    if "c" in manifest and int(manifest["c"]) != np.unique(labels).size:
        raise DatasetError("manifest class count disagrees with labels")
    return MultiViewDataset(views=views, labels=labels, name=manifest.get("name", path.name))


def save_dataset(ds, path):
    """Write the canonical directory format (full-precision floats, so a
    load/save/load round trip is bit-identical)."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    view_files = [f"view_{v}.csv" for v in range(ds.m)]
    manifest = {
        "name": ds.name,
        "n": ds.n,
        "m": ds.m,
        "c": ds.c,
        "dims": ds.dims,
        "view_files": view_files,
        "label_file": "labels.csv",
    }
    with open(path / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    for v, fname in enumerate(view_files):
        np.savetxt(path / fname, ds.views[v].T, delimiter=",", fmt=FLOAT_FMT, newline="\n")
    np.savetxt(path / "labels.csv", ds.labels, fmt="%d", newline="\n")
    return path


def load_mask(path):
    present = np.loadtxt(path, delimiter=",", ndmin=2)
    return MissingMask(present=present != 0)


def save_mask(mask, path):
    np.savetxt(path, mask.present.astype(int), delimiter=",", fmt="%d", newline="\n")
    return Path(path)


def apply_missing(ds, rate, seed):
    """Construct a missing mask: a fraction ``rate`` of the samples lose a
    uniformly random nonempty proper subset of their views, the rest stay
    complete.

    Exactly round(rate * n) samples are marked incomplete.  Removal of a
    proper subset guarantees every sample keeps at least one view.  The
    draw is deterministic given the seed.
    """
    if not 0.0 <= rate < 1.0:
        raise DatasetError(f"missing rate {rate} outside [0, 1)")
    n, m, c = ds.n, ds.m, ds.c
    n_incomplete = int(rate * n + 0.5)
    present = np.ones((n, m), dtype=bool)
    if n_incomplete == 0:
        return MissingMask(present=present)
    if m < 2:
        raise DatasetError("cannot remove views from a single-view dataset")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(n, size=n_incomplete, replace=False)
    # uniform over the 2^m - 2 nonempty proper subsets, encoded as bitmasks
    codes = rng.integers(1, 2**m - 1, size=n_incomplete)
    for j, code in zip(chosen, codes):
        for v in range(m):
            if code >> v & 1:
                present[j, v] = False
    counts = present.sum(axis=0)
    if (counts < c).any():
        raise DatasetError(
            f"infeasible rate {rate}: some view keeps fewer samples than the {c} clusters"
        )
    return MissingMask(present=present)


def build_incomplete_views(ds, mask):
    """Extract the observed columns of every view in ascending global order."""
    if mask.present.shape != (ds.n, ds.m):
        raise DatasetError("mask shape does not match dataset")
    out = []
    for v in range(ds.m):
        index = np.flatnonzero(mask.present[:, v])
        out.append(IncompleteView(x_o=ds.views[v][:, index], index=index, n=ds.n))
    return out


def normalize_features(ds):
    """Scale every sample column to unit l2 norm (zero columns untouched)."""
    views = []
    for x in ds.views:
        norms = np.linalg.norm(x, axis=0)
        safe = np.where(norms > 0, norms, 1.0)
        views.append(x / safe)
    return MultiViewDataset(views=views, labels=ds.labels.copy(), name=ds.name)


# synthetic generator geometry: class centers are redrawn until separated,
# and per view a small fraction of samples drift in latent space so their
# similarities mislead that single view while the other views disagree
CENTER_SEPARATION = 1.5
DRIFT_FRACTION = 0.08
DRIFT_SCALE = 5.0


def make_synthetic(n_per_class, classes, views, dims, noise, seed):
    """Generate a clusterable multi-view dataset with controlled corruption.

    Each class gets a random latent center (redrawn until pairwise
    separation reaches 1.5, so unlucky seeds cannot collapse two classes)
    and sample latents add Gaussian jitter of scale ``noise``.  Each view
    then perturbs the latents of a small fraction of samples by Gaussian
    drift of scale 5 * ``noise`` (view-inconsistent corruption: those
    samples resemble another class in that view only), applies a random
    linear map, and adds Gaussian observation noise of scale ``noise``.
    All randomness is deterministic per seed, and ``noise`` = 0 produces
    identical samples within a class in every view.
    """
    if classes < 2:
        raise DatasetError("need at least 2 classes")
    if len(dims) != views:
        raise DatasetError(f"got {len(dims)} dims for {views} views")
    rng = np.random.default_rng(seed)
    latent_dim = classes
    centers = rng.normal(size=(classes, latent_dim))
    for _ in range(100):
        dists = np.linalg.norm(centers[:, None, :] - centers[None, :, :], axis=2)
        if dists[~np.eye(classes, dtype=bool)].min() >= CENTER_SEPARATION:
            break
        centers = rng.normal(size=(classes, latent_dim))
    n = n_per_class * classes
    labels = np.repeat(np.arange(classes), n_per_class)
    latents = centers[labels] + noise * rng.normal(size=(n, latent_dim))
    out_views = []
    for v in range(views):
        view_lat = latents.copy()
        if noise > 0 and DRIFT_FRACTION > 0:
            n_drift = int(round(DRIFT_FRACTION * n))
            cols = rng.choice(n, size=n_drift, replace=False)
            view_lat[cols] += DRIFT_SCALE * noise * rng.normal(size=(n_drift, latent_dim))
        basis = rng.normal(size=(dims[v], latent_dim)) / np.sqrt(latent_dim)
        x = basis @ view_lat.T + noise * rng.normal(size=(dims[v], n))
        out_views.append(x)
    return MultiViewDataset(views=out_views, labels=labels, name="synthetic")
