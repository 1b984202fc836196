import numpy as np
import pytest

from engage.resample import (SmoteLineage, VariantSpec, default_variant_specs,
                             find_tomek_links, kde_curve, kde_overlap, make_variant,
                             make_variants, smote, tomek_remove_majority)

from .test_preprocess import make_ds


def colinearity_residual(p, a, b):
    """Distance of p from segment [a, b], per brute-force projection."""
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.linalg.norm(p - a))
    t = float((p - a) @ ab) / denom
    t = min(max(t, 0.0), 1.0)
    return float(np.linalg.norm(p - (a + t * ab)))


class TestSmote:
    def test_interpolation_on_segment(self):
        ds = make_ds([[0.0, 0.0], [1.0, 1.0]], y=[1, 1])
        out = smote(ds, {1: 3}, k=1, seed=0)
        assert out.n == 3
        synth = out.X[2, :2]
        assert synth[0] == pytest.approx(synth[1])  # on the diagonal segment
        assert 0.0 <= synth[0] <= 1.0

    def test_target_equal_current_noop(self):
        ds = make_ds([[0.0], [1.0]], y=[1, 1])
        out = smote(ds, {1: 2}, seed=0)
        assert out.n == 2
        assert np.array_equal(out.X, ds.X)

    def test_synthetics_are_convex_combinations(self):
        rng = np.random.default_rng(0)
        X = rng.random((40, 5))
        y = np.array([1] * 25 + [0] * 15)
        ds = make_ds(X, y=y)
        lineage = SmoteLineage()
        out = smote(ds, {0: 1015}, k=5, seed=1, lineage=lineage)
        originals = {sid: i for i, sid in enumerate(ds.ids)}
        checked = 0
        for i in range(ds.n, out.n):
            sid = out.ids[i]
            pa, pb = lineage.parents[sid]
            resid = colinearity_residual(out.X[i], ds.X[originals[pa]],
                                         ds.X[originals[pb]])
            assert resid < 1e-9
            assert out.y[i] == 0
            checked += 1
        assert checked == 1000

    def test_labels_copied_and_originals_retained(self):
        ds = make_ds([[0.0], [0.5], [1.0], [9.0]], y=[0, 0, 0, 1])
        out = smote(ds, {0: 6}, k=2, seed=3)
        assert out.class_counts() == {"HI": 1, "LO": 6}
        assert out.ids[:4] == ds.ids
        assert np.array_equal(out.X[:4], ds.X)

    def test_no_duplicate_of_original(self):
        rng = np.random.default_rng(5)
        ds = make_ds(rng.random((20, 4)), y=[0] * 20)
        out = smote(ds, {0: 200}, seed=9)
        originals = {tuple(row) for row in ds.X}
        dupes = sum(tuple(row) in originals for row in out.X[20:])
        assert dupes == 0


class TestTomek:
    def test_close_cross_pair_removes_majority_member(self):
        X = [[0.0, 0.0], [0.1, 0.0], [10.0, 10.0], [20.0, 20.0], [30.0, 30.0]]
        y = [1, 0, 1, 1, 1]  # HI majority; (0, 1) is a mutual-1NN cross pair
        ds = make_ds(X, y=y)
        links = find_tomek_links(ds)
        assert (0, 1) in links
        out = tomek_remove_majority(ds)
        assert "r0" not in out.ids
        assert "r1" in out.ids

    def test_separated_clusters_no_links(self):
        X = [[0.0, 0.0], [0.2, 0.0], [0.1, 0.1], [5.0, 5.0], [5.2, 5.0], [5.1, 5.1]]
        y = [0, 0, 0, 1, 1, 1]
        ds = make_ds(X, y=y)
        assert find_tomek_links(ds) == []
        assert tomek_remove_majority(ds).n == 6

    def test_minority_rows_never_removed(self):
        rng = np.random.default_rng(2)
        X = np.vstack([rng.normal(0, 1, (30, 3)), rng.normal(0.5, 1, (12, 3))])
        y = np.array([1] * 30 + [0] * 12)
        ds = make_ds(X, y=y)
        out = tomek_remove_majority(ds)
        assert out.class_counts()["LO"] == 12
        assert out.class_counts()["HI"] <= 30


class TestVariants:
    def _train(self, n_hi=136, n_lo=86, seed=4):
        rng = np.random.default_rng(seed)
        X = np.vstack([rng.normal(0.6, 0.15, (n_hi, 6)),
                       rng.normal(0.4, 0.15, (n_lo, 6))]).clip(0, 1)
        y = np.array([1] * n_hi + [0] * n_lo)
        return make_ds(X, y=y)

    def test_paper_sizes(self):
        train = self._train()
        out = make_variants(train, seed=0)
        sizes = [(v.class_counts()["HI"], v.class_counts()["LO"]) for _, v in out]
        assert sizes == [(86, 86), (136, 136), (200, 200), (300, 300)]

    def test_already_balanced_downsample_is_identity(self):
        train = self._train(n_hi=50, n_lo=50)
        spec = default_variant_specs(train)[0]
        v = make_variant(train, spec, seed=0)
        assert v.ids == train.ids

    def test_reproducible_per_seed(self):
        train = self._train()
        a = make_variants(train, seed=7)
        b = make_variants(train, seed=7)
        for (_, va), (_, vb) in zip(a, b):
            assert va.ids == vb.ids
            assert np.array_equal(va.X, vb.X)

    def test_kde_overlap_of_augmented_minority(self):
        train = self._train()
        spec = VariantSpec("upsampled_300", "smote_tomek", 300)
        v = make_variant(train, spec, seed=1)
        for col in range(4):
            orig = train.X[train.y == 0][:, col]
            aug = v.X[v.y == 0][:, col]
            assert kde_overlap(orig, aug) >= 0.7

    def test_exact_balance_and_distinct_rows(self):
        train = self._train(n_hi=40, n_lo=25)
        for spec, v in make_variants(train, seed=3):
            counts = v.class_counts()
            assert counts["HI"] == counts["LO"]
            assert len(v.ids) == len(set(v.ids))


class TestKde:
    def test_standard_normal_peak(self):
        rng = np.random.default_rng(0)
        curve = kde_curve(rng.normal(size=1000))
        x, dens = curve[:, 0], curve[:, 1]
        assert dens[np.argmin(np.abs(x))] == pytest.approx(0.3989, abs=0.05)

    def test_integrates_to_one(self):
        rng = np.random.default_rng(1)
        curve = kde_curve(rng.normal(size=1000))
        integral = np.trapezoid(curve[:, 1], curve[:, 0])
        assert integral == pytest.approx(1.0, abs=1e-3)

    def test_two_point_sample_bimodal_symmetric(self):
        curve = kde_curve([0.0, 10.0])
        dens = curve[:, 1]
        assert np.allclose(dens, dens[::-1], atol=1e-12)
        mid = len(dens) // 2
        assert dens[:mid].max() > dens[mid] and dens[mid:].max() > dens[mid]

    def test_grid_size(self):
        assert kde_curve([1.0, 2.0, 3.0]).shape == (200, 2)

    def test_degenerate_samples_rejected(self):
        from engage.errors import DegenerateSample
        with pytest.raises(DegenerateSample):
            kde_curve([3.0])
        with pytest.raises(DegenerateSample):
            kde_curve([3.0, 3.0, 3.0])
