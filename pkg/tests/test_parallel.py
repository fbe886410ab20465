"""Tests for the parallel sweep helpers (map_parallel, regime_many, certify_many)."""

from __future__ import annotations

import threading

import pytest

from crestline import RegimeError, certify, certify_many, regime_many
from crestline._parallel import default_workers, is_free_threaded, map_parallel


class TestMapParallel:
    """map_parallel() ordering and dispatch."""

    def test_order_preserved(self) -> None:
        """Results come back in input order."""
        assert map_parallel(lambda x: x * x, list(range(20)), max_workers=4) == [
            x * x for x in range(20)
        ]

    def test_empty(self) -> None:
        assert map_parallel(str, []) == []

    def test_single_worker_runs_inline(self) -> None:
        """One worker (or one item) stays on the calling thread."""
        caller = threading.get_ident()
        seen = map_parallel(lambda _: threading.get_ident(), [1, 2, 3], max_workers=1)
        assert set(seen) == {caller}
        assert map_parallel(lambda _: threading.get_ident(), [1]) == [caller]

    def test_exception_propagates(self) -> None:
        def boom(x: int) -> int:
            if x == 3:
                raise ValueError("three")
            return x

        with pytest.raises(ValueError, match="three"):
            map_parallel(boom, list(range(6)), max_workers=3)

    def test_default_workers(self) -> None:
        assert 1 <= default_workers() <= 4
        assert isinstance(is_free_threaded(), bool)


class TestRegimeMany:
    """regime_many() sweeps."""

    def test_matches_sequential(self, zero_model) -> None:
        rs = [1.6, 1.8, 2.0, 2.5, 3.0]
        parallel = regime_many(zero_model, rs, max_workers=4)
        sequential = regime_many(zero_model, rs, max_workers=1)
        assert [reg.to_dict() for reg in parallel] == [reg.to_dict() for reg in sequential]

    def test_rejection_propagates(self, zero_model) -> None:
        with pytest.raises(RegimeError):
            regime_many(zero_model, [1.6, 1.0, 2.0], max_workers=3)


class TestCertifyMany:
    """certify_many() batches."""

    def test_matches_individual(self, onset_r2) -> None:
        fields = [onset_r2.field] * 4
        results = certify_many(fields, max_workers=4)
        single = certify(onset_r2.field)
        assert [d.to_dict() for d in results] == [single.to_dict()] * 4

    def test_empty(self) -> None:
        assert certify_many([]) == []
