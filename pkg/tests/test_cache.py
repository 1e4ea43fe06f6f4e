import json

from divisum.cache import (
    cache_path,
    clear_cache,
    get_eigenforms,
    load_eigenforms,
    store_eigenforms,
)
from divisum.modforms import hecke_eigenforms


class TestEigenformCache:
    """Test cases for the eigenform disk cache"""

    def test_store_and_load(self, cache_dir, prec):
        """Test that stored coefficients are loaded back within their radii"""
        forms = hecke_eigenforms(24, 40, prec)
        path = store_eigenforms(24, forms, 40, prec, cache_dir)
        assert path == cache_path(24, cache_dir)
        loaded = load_eigenforms(24, 40, prec, cache_dir)
        assert loaded is not None
        assert len(loaded) == 2
        for original, restored in zip(forms, loaded):
            assert restored.conjugacy_tag == original.conjugacy_tag
            for m in (1, 2, 17, 39):
                assert restored.a(m).overlaps(original.a(m))

    def test_load_smaller_request(self, cache_dir, prec):
        """Test that a file with more terms serves a shorter request"""
        store_eigenforms(12, hecke_eigenforms(12, 40, prec), 40, prec, cache_dir)
        loaded = load_eigenforms(12, 20, prec, cache_dir)
        assert loaded[0].M == 20

    def test_stale_file_is_ignored(self, cache_dir, prec):
        """Test that too few terms or too little precision is a cache miss"""
        store_eigenforms(12, hecke_eigenforms(12, 20, prec), 20, prec, cache_dir)
        assert load_eigenforms(12, 40, prec, cache_dir) is None
        assert load_eigenforms(12, 20, 2 * prec, cache_dir) is None

    def test_missing_and_corrupt_files(self, cache_dir, prec):
        """Test that missing or unreadable files are a cache miss"""
        assert load_eigenforms(12, 20, prec, cache_dir) is None
        cache_path(12, cache_dir).write_text("{not json")
        assert load_eigenforms(12, 20, prec, cache_dir) is None

    def test_get_writes_cache(self, cache_dir, prec):
        """Test that get_eigenforms fills the cache on a miss"""
        forms = get_eigenforms(12, 30, prec, cache_dir)
        path = cache_path(12, cache_dir)
        assert path.exists()
        data = json.loads(path.read_text())
        assert data["weight"] == 12
        assert data["M"] == 30
        assert len(data["forms"]) == 1
        again = get_eigenforms(12, 30, prec, cache_dir)
        assert again[0].a(2).overlaps(forms[0].a(2))

    def test_clear(self, cache_dir, prec):
        """Test that clearing removes every weight file"""
        get_eigenforms(12, 30, prec, cache_dir)
        get_eigenforms(16, 30, prec, cache_dir)
        assert clear_cache(cache_dir) == 2
        assert clear_cache(cache_dir) == 0
        assert not cache_path(12, cache_dir).exists()
