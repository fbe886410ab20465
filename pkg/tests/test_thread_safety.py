"""Thread safety tests for registries and concurrent solver runs."""

from __future__ import annotations

import concurrent.futures
import threading

from crestline import (
    conjugate_streams,
    critical_parameters,
    dispersion_eigenvalue,
    get_formatter,
    get_vorticity_class,
)


class TestConcurrentRegistryAccess:
    """Lazy registries hand out one object per name under contention."""

    def test_vorticity_registry(self) -> None:
        """Concurrent first lookups resolve to the same class."""
        kinds = ["zero", "constant", "linear", "tabulated", "table"]
        barrier = threading.Barrier(8)

        def lookup(kind: str) -> type:
            barrier.wait()
            return get_vorticity_class(kind)

        with concurrent.futures.ThreadPoolExecutor(max_workers=8) as executor:
            results = list(executor.map(lookup, (kinds * 2)[:8]))

        for kind, cls in zip((kinds * 2)[:8], results, strict=True):
            assert cls is get_vorticity_class(kind)

    def test_formatter_registry(self) -> None:
        names = ["json", "terminal", "ansi", "text"] * 10

        with concurrent.futures.ThreadPoolExecutor(max_workers=8) as executor:
            results = list(executor.map(get_formatter, names))

        assert len({id(f) for f in results}) == 2


class TestConcurrentSolvers:
    """Independent regimes computed from many threads agree with serial runs."""

    def test_conjugate_streams(self, zero_model) -> None:
        rs = [1.6 + 0.1 * i for i in range(16)]
        serial = [conjugate_streams(zero_model, r).to_dict() for r in rs]

        with concurrent.futures.ThreadPoolExecutor(max_workers=8) as executor:
            results = list(executor.map(lambda r: conjugate_streams(zero_model, r).to_dict(), rs))

        assert results == serial

    def test_shared_model(self, unit_vorticity) -> None:
        """One model instance is read by every thread."""
        expected = critical_parameters(unit_vorticity)

        with concurrent.futures.ThreadPoolExecutor(max_workers=4) as executor:
            results = list(executor.map(lambda _: critical_parameters(unit_vorticity), range(8)))

        assert all(c == expected for c in results)

    def test_dispersion(self, zero_model) -> None:
        rs = [1.8, 2.0, 2.4, 3.0]

        def root(r: float) -> float:
            return dispersion_eigenvalue(conjugate_streams(zero_model, r).subcritical).lambda0

        serial = [root(r) for r in rs]
        with concurrent.futures.ThreadPoolExecutor(max_workers=4) as executor:
            assert list(executor.map(root, rs)) == serial
