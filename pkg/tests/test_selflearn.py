import numpy as np
import pytest

from fipp.embio import Embedding, SeedDictionary
from fipp.selflearn import AugmentationConfig, augment_dictionary, induce_candidates
from fipp.synthetic import identity_dictionary, random_unit_vectors, rotated_pair


def make_embedding(matrix, prefix="w"):
    return Embedding([f"{prefix}{i}" for i in range(matrix.shape[0])], np.asarray(matrix, float))


class TestAugmentDictionary:
    def test_identical_spaces_add_identity_pairs(self):
        rows = random_unit_vectors(20, 6, np.random.default_rng(0))
        src = make_embedding(rows)
        tgt = make_embedding(rows, prefix="v")
        seed = identity_dictionary(range(8))
        out = augment_dictionary(src, tgt, seed, AugmentationConfig(n_pairs=5))
        added = out.pairs[len(seed) :]
        assert len(added) == 5
        assert all(s == t for s, t in added)
        top = induce_candidates(src, tgt, seed)[0]
        assert top.similarity == pytest.approx(1.0)

    def test_zero_pairs_is_identity(self):
        rows = random_unit_vectors(10, 4, np.random.default_rng(1))
        src, tgt = make_embedding(rows), make_embedding(rows, prefix="v")
        seed = identity_dictionary(range(4))
        out = augment_dictionary(src, tgt, seed, AugmentationConfig(n_pairs=0))
        assert out is seed

    def test_ground_truth_recovery_on_rotated_pair(self):
        src, tgt = rotated_pair(n=500, d1=20, d2=20, seed=2)
        seed = identity_dictionary(range(50))
        out = augment_dictionary(src, tgt, seed, AugmentationConfig(n_pairs=100))
        added = out.pairs[len(seed) :]
        matches = sum(1 for s, t in added if s == t)
        assert matches / len(added) >= 0.9

    def test_top_n_property_by_enumeration(self):
        src, tgt = rotated_pair(n=120, d1=8, d2=8, noise=0.1, seed=3)
        seed = identity_dictionary(range(20))
        cfg = AugmentationConfig(n_pairs=30)
        out = augment_dictionary(src, tgt, seed, cfg)
        added = set(out.pairs[len(seed) :])
        candidates = induce_candidates(src, tgt, seed)
        eligible = [c for c in candidates if (c.src_index, c.tgt_index) not in set(seed.pairs)]
        worst_added = min(c.similarity for c in eligible if (c.src_index, c.tgt_index) in added)
        for cand in eligible:
            if (cand.src_index, cand.tgt_index) not in added:
                assert cand.similarity <= worst_added + 1e-12

    def test_seed_always_preserved_and_bounded(self):
        src, tgt = rotated_pair(n=60, d1=5, d2=5, noise=0.2, seed=4)
        seed = identity_dictionary([3, 7, 11])
        cfg = AugmentationConfig(n_pairs=10)
        out = augment_dictionary(src, tgt, seed, cfg)
        assert out.pairs[: len(seed)] == seed.pairs
        assert len(out) <= len(seed) + cfg.n_pairs

    def test_warns_when_budget_exceeds_candidates(self):
        rows = random_unit_vectors(6, 3, np.random.default_rng(5))
        src, tgt = make_embedding(rows), make_embedding(rows, prefix="v")
        seed = identity_dictionary(range(6))
        with pytest.warns(RuntimeWarning, match="available"):
            out = augment_dictionary(src, tgt, seed, AugmentationConfig(n_pairs=50))
        assert len(out) <= 6 + 6

    def test_exclude_seed_skips_duplicates(self):
        # seed covers words 0..3, whose top candidates collide with the seed;
        # skipping them must not consume the budget, so 4..7 still get added
        rows = random_unit_vectors(8, 4, np.random.default_rng(6))
        src, tgt = make_embedding(rows), make_embedding(rows, prefix="v")
        seed = identity_dictionary(range(4))
        out = augment_dictionary(src, tgt, seed, AugmentationConfig(n_pairs=4, exclude_seed=True))
        assert set(out.pairs[len(seed) :]) == {(4, 4), (5, 5), (6, 6), (7, 7)}

    def test_keep_seed_duplicates_still_deduped(self):
        rows = random_unit_vectors(8, 4, np.random.default_rng(7))
        src, tgt = make_embedding(rows), make_embedding(rows, prefix="v")
        seed = identity_dictionary(range(8))
        out = augment_dictionary(src, tgt, seed, AugmentationConfig(n_pairs=3, exclude_seed=False))
        # the top candidates equal seed pairs, so they are consumed by the
        # budget but collapse in the merged dictionary
        assert out.pairs == seed.pairs

    def test_deterministic_tie_breaking(self):
        # two identical source rows tie for the same target: lower source
        # index must come first in the candidate ordering
        matrix = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        src = make_embedding(matrix)
        tgt = make_embedding(matrix, prefix="v")
        seed = SeedDictionary(pairs=[(2, 2), (0, 0)])
        candidates = induce_candidates(src, tgt, seed)
        tied = [c for c in candidates if c.similarity == pytest.approx(1.0)]
        sources = [c.src_index for c in tied]
        assert sources == sorted(sources)
        # identical targets: argmax picks the lower target index
        matrix_t = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        tgt2 = make_embedding(matrix_t, prefix="u")
        best = induce_candidates(src, tgt2, SeedDictionary(pairs=[(0, 0), (2, 2)]))
        for cand in best:
            if cand.src_index in (0, 1):
                assert cand.tgt_index == 0

    def test_rejects_negative_budget(self):
        with pytest.raises(ValueError):
            AugmentationConfig(n_pairs=-1)
