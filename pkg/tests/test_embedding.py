import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdmkit.embedding import (HashingEmbedder, TableEmbedder, cosine,
                              l2_normalize, load_vector_table,
                              provider_from_spec)


class TestCosine:
    def test_self_similarity_is_one(self):
        v = np.array([0.3, -1.2, 4.0])
        assert cosine(v, v) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_hand_value(self):
        assert cosine([1.0, 1.0], [1.0, 0.0]) == pytest.approx(1 / np.sqrt(2))

    def test_zero_vector_convention(self):
        assert cosine([0.0, 0.0], [1.0, 2.0]) == 0.0

    def test_dim_mismatch(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            cosine([1.0], [1.0, 2.0])

    @given(st.lists(st.floats(-10, 10), min_size=3, max_size=3),
           st.lists(st.floats(-10, 10), min_size=3, max_size=3))
    def test_symmetry_and_bounds(self, u, v):
        assert cosine(u, v) == pytest.approx(cosine(v, u), abs=1e-12)
        assert abs(cosine(u, v)) <= 1.0 + 1e-12

    @given(st.lists(st.floats(-5, 5), min_size=4, max_size=4),
           st.floats(0.01, 100.0))
    def test_scale_invariance(self, u, alpha):
        v = np.array([1.0, -2.0, 0.5, 3.0])
        scaled = cosine(alpha * np.asarray(u), v)
        assert scaled == pytest.approx(cosine(u, v), abs=1e-9)


class TestHashingEmbedder:
    def test_deterministic(self):
        e = HashingEmbedder()
        assert np.array_equal(e.embed("青绿山水"), e.embed("青绿山水"))

    def test_empty_text_is_zero(self):
        assert not HashingEmbedder().embed("").any()

    def test_unit_norm_for_nonempty(self):
        e = HashingEmbedder()
        for text in ("a", "山水", "ancient landscape painting", "笔墨意境"):
            assert np.linalg.norm(e.embed(text)) == pytest.approx(1.0, abs=1e-6)

    def test_disjoint_strings_near_orthogonal(self):
        e = HashingEmbedder(dim=256)
        # Frozen fixture pair with no shared characters.
        value = cosine(e.embed("山水画卷轴笔墨"), e.embed("kappa test stats"))
        assert abs(value) < 0.2

    def test_dim_respected(self):
        assert HashingEmbedder(dim=64).embed("x").shape == (64,)

    def test_transform_stacks(self):
        out = HashingEmbedder(dim=32).transform(["a", "b", "c"])
        assert out.shape == (3, 32)

    def test_bad_dim_rejected(self):
        with pytest.raises(ValueError, match="dim"):
            HashingEmbedder(dim=0).embed("x")

    def test_sklearn_params_roundtrip(self):
        e = HashingEmbedder(dim=128)
        assert e.get_params()["dim"] == 128
        e.set_params(dim=64)
        assert e.embed("x").shape == (64,)

    @settings(max_examples=50)
    @given(st.text(min_size=1, max_size=30))
    def test_norm_property(self, text):
        assert np.linalg.norm(HashingEmbedder(dim=64).embed(text)) == \
            pytest.approx(1.0, abs=1e-6)


class TestTableEmbedder:
    def test_lookup(self):
        e = TableEmbedder(table={"x": [1.0, 0.0]})
        assert np.array_equal(e.embed("x"), [1.0, 0.0])

    def test_fallback_is_deterministic_hash(self):
        e = TableEmbedder(table={"x": np.zeros(16)}, dim=16)
        expected = HashingEmbedder(dim=16).embed("unknown")
        assert np.array_equal(e.embed("unknown"), expected)

    def test_table_file_roundtrip(self, tmp_path):
        path = tmp_path / "vectors.tsv"
        path.write_text("x\t1 0\ny\t0 1\n", encoding="utf-8")
        e = load_vector_table(path)
        assert np.array_equal(e.embed("x"), [1.0, 0.0])
        assert np.array_equal(e.embed("y"), [0.0, 1.0])

    def test_dimension_mismatch_names_row(self, tmp_path):
        path = tmp_path / "vectors.tsv"
        path.write_text("x\t1 0\ny\t0 1 2\n", encoding="utf-8")
        with pytest.raises(ValueError, match="row 2"):
            load_vector_table(path)

    def test_duplicate_text_rejected(self, tmp_path):
        path = tmp_path / "vectors.tsv"
        path.write_text("x\t1 0\nx\t0 1\n", encoding="utf-8")
        with pytest.raises(ValueError, match="duplicate"):
            load_vector_table(path)


class TestProviderSpec:
    def test_baseline(self):
        assert provider_from_spec("baseline", dim=32).name == "baseline"

    def test_table(self, tmp_path):
        path = tmp_path / "v.tsv"
        path.write_text("t\t1 2 3\n", encoding="utf-8")
        provider = provider_from_spec(f"table:{path}")
        assert provider.name == "table"
        assert np.array_equal(provider.embed("t"), [1.0, 2.0, 3.0])

    def test_unknown(self):
        with pytest.raises(ValueError, match="unknown embedding provider"):
            provider_from_spec("magic")


def test_l2_normalize_zero_passthrough():
    assert not l2_normalize(np.zeros(4)).any()
