"""Class rebalancing: SMOTE interpolation, Tomek-link cleanup, the four
balanced dataset variants, and kernel-density curves for drift inspection.

Distances are Euclidean over the already min-max-scaled features, so no
single feature dominates the neighborhoods.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ClassOfSizeOne, DegenerateSample
from .pipeline import Dataset
from .rng import child_rng


def _pairwise_sq_dists(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    aa = np.sum(A * A, axis=1)[:, None]
    bb = np.sum(B * B, axis=1)[None, :]
    d = aa + bb - 2.0 * (A @ B.T)
    return np.maximum(d, 0.0)


@dataclass
class SmoteLineage:
    """Parent original-row ids consulted for each synthetic row."""
    parents: dict[str, tuple[str, str]] = field(default_factory=dict)

    def origin_ids(self) -> set[str]:
        out = set()
        for a, b in self.parents.values():
            out.add(a)
            out.add(b)
        return out


def smote(ds: Dataset, target_per_class: dict[int, int], k: int = 5, seed: int = 0,
          lineage: SmoteLineage | None = None, id_prefix: str = "syn") -> Dataset:
    """Grow classes to their targets by interpolating between same-class neighbors.

    Each synthetic point is x + u * (x_nn - x) for a random member x, a random
    one of its k nearest same-class neighbors x_nn, and u ~ Uniform(0, 1).
    Originals are retained; k shrinks to class size - 1 when needed.
    """
    new_rows, new_ids, new_labels = [], [], []
    counter = 0
    for cls in sorted(target_per_class):
        members = np.flatnonzero(ds.y == cls)
        need = target_per_class[cls] - members.size
        if need < 0:
            raise ValueError(f"class {cls}: target below current size")
        if need == 0:
            continue
        if members.size < 2:
            raise ClassOfSizeOne(f"class {cls} has {members.size} member(s)")
        k_eff = min(k, members.size - 1)
        Xc = ds.X[members]
        d = _pairwise_sq_dists(Xc, Xc)
        np.fill_diagonal(d, np.inf)
        # ties resolved by index through stable argsort
        neighbor_idx = np.argsort(d, axis=1, kind="stable")[:, :k_eff]
        rng = child_rng(seed, "smote", cls)
        for _ in range(need):
            i = int(rng.integers(members.size))
            j = int(neighbor_idx[i, rng.integers(k_eff)])
            u = rng.uniform()
            new_rows.append(Xc[i] + u * (Xc[j] - Xc[i]))
            sid = f"{id_prefix}:{cls}:{counter}"
            counter += 1
            new_ids.append(sid)
            new_labels.append(cls)
            if lineage is not None:
                lineage.parents[sid] = (ds.ids[members[i]], ds.ids[members[j]])
    if not new_rows:
        return ds.copy()
    return Dataset(ids=list(ds.ids) + new_ids,
                   X=np.vstack([ds.X, np.asarray(new_rows)]),
                   y=np.concatenate([ds.y, np.asarray(new_labels, dtype=np.int8)]))


def find_tomek_links(ds: Dataset) -> list[tuple[int, int]]:
    """Mutual 1-NN pairs of opposite classes; nearest-neighbor ties break by index."""
    d = _pairwise_sq_dists(ds.X, ds.X)
    np.fill_diagonal(d, np.inf)
    nn = np.argmin(d, axis=1)  # argmin takes the lowest index on ties
    links = []
    for i in range(ds.n):
        j = int(nn[i])
        if i < j and nn[j] == i and ds.y[i] != ds.y[j]:
            links.append((i, j))
    return links


def tomek_remove_majority(ds: Dataset, majority_label: int | None = None) -> Dataset:
    """Drop the majority-class member of every Tomek link.

    ``majority_label`` pins which class counts as majority; by default it is
    the larger class in ``ds`` (ties keep HI=1 as majority so the original
    imbalance direction is preserved through balanced intermediates).
    """
    if majority_label is None:
        counts = ds.class_counts()
        majority_label = 1 if counts["HI"] >= counts["LO"] else 0
    drop = set()
    for i, j in find_tomek_links(ds):
        if ds.y[i] == majority_label:
            drop.add(i)
        if ds.y[j] == majority_label:
            drop.add(j)
    keep = [i for i in range(ds.n) if i not in drop]
    return ds.subset(keep)


@dataclass(frozen=True)
class VariantSpec:
    name: str
    kind: str              # "downsample" or "smote_tomek"
    target_per_class: int  # ignored for downsample


def default_variant_specs(train: Dataset) -> list[VariantSpec]:
    counts = train.class_counts()
    majority = max(counts.values())
    return [
        VariantSpec("downsampled", "downsample", min(counts.values())),
        VariantSpec("balanced_to_majority", "smote_tomek", majority),
        VariantSpec("upsampled_200", "smote_tomek", max(200, majority)),
        VariantSpec("upsampled_300", "smote_tomek", max(300, majority)),
    ]


def make_variant(train: Dataset, spec: VariantSpec, seed: int,
                 smote_k: int = 5, lineage: SmoteLineage | None = None) -> Dataset:
    """One exactly balanced variant.

    downsample: majority class randomly cut to minority size.
    smote_tomek: SMOTE both classes to the target, remove Tomek links from the
    majority side, then SMOTE again to restore the exact target.
    """
    counts = train.class_counts()
    majority_label = 1 if counts["HI"] >= counts["LO"] else 0
    if spec.kind == "downsample":
        minority_size = min(counts.values())
        keep = []
        for cls in (0, 1):
            members = np.flatnonzero(train.y == cls)
            if members.size > minority_size:
                rng = child_rng(seed, "downsample", spec.name, cls)
                members = np.sort(rng.choice(members, size=minority_size, replace=False))
            keep.extend(members.tolist())
        return train.subset(np.sort(np.asarray(keep)))
    if spec.kind != "smote_tomek":
        raise ValueError(f"unknown variant kind {spec.kind!r}")

    target = {0: spec.target_per_class, 1: spec.target_per_class}
    grown = smote(train, target, k=smote_k, seed=seed, lineage=lineage,
                  id_prefix=f"syn:{spec.name}:a")
    cleaned = tomek_remove_majority(grown, majority_label=majority_label)
    topped = smote(cleaned, target, k=smote_k, seed=seed + 1, lineage=lineage,
                   id_prefix=f"syn:{spec.name}:b")
    counts_after = topped.class_counts()
    assert counts_after["HI"] == counts_after["LO"] == spec.target_per_class
    return topped


def make_variants(train: Dataset, seed: int, specs: list[VariantSpec] | None = None,
                  smote_k: int = 5, lineage: SmoteLineage | None = None,
                  ) -> list[tuple[VariantSpec, Dataset]]:
    specs = specs if specs is not None else default_variant_specs(train)
    return [(spec, make_variant(train, spec, seed=seed, smote_k=smote_k,
                                lineage=lineage)) for spec in specs]


# -- kernel density estimation -------------------------------------------------

def kde_curve(values, grid_points: int = 200) -> np.ndarray:
    """Gaussian KDE with Silverman bandwidth on an even grid.

    Returns an array of shape (grid_points, 2): x and density. The grid spans
    [min - 3h, max + 3h].
    """
    a = np.asarray(values, dtype=float)
    if a.size < 2:
        raise DegenerateSample("KDE needs at least 2 values")
    sd = float(a.std())
    if sd == 0.0:
        raise DegenerateSample("KDE needs nonzero spread")
    h = 1.06 * sd * a.size ** (-1 / 5)
    xs = np.linspace(a.min() - 3 * h, a.max() + 3 * h, grid_points)
    z = (xs[:, None] - a[None, :]) / h
    dens = np.exp(-0.5 * z * z).sum(axis=1) / (a.size * h * math.sqrt(2 * math.pi))
    return np.column_stack([xs, dens])


def kde_overlap(a, b, grid_points: int = 400) -> float:
    """Integral of min(f, g) over a shared grid; 1.0 means identical densities."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ca, cb = kde_curve(a, grid_points), kde_curve(b, grid_points)
    lo = min(ca[0, 0], cb[0, 0])
    hi = max(ca[-1, 0], cb[-1, 0])
    xs = np.linspace(lo, hi, grid_points)

    def density_on(xs, sample):
        sd = float(sample.std())
        h = 1.06 * sd * sample.size ** (-1 / 5)
        z = (xs[:, None] - sample[None, :]) / h
        return np.exp(-0.5 * z * z).sum(axis=1) / (sample.size * h * math.sqrt(2 * math.pi))

    fa, fb = density_on(xs, a), density_on(xs, b)
    return float(np.trapezoid(np.minimum(fa, fb), xs))
