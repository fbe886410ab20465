"""Tests for the enums and small records in crestline._types."""

from __future__ import annotations

import pytest

from crestline import BoundRecord, BranchLabel, GridKind, HaltReason, OmegaClass


class TestOmegaClass:
    """Sign classes of vorticity."""

    @pytest.mark.parametrize(
        "cls,nonnegative,breaking",
        [
            (OmegaClass.ZERO, True, False),
            (OmegaClass.NONNEGATIVE, True, False),
            (OmegaClass.GENERAL, False, True),
        ],
    )
    def test_properties(self, cls: OmegaClass, nonnegative: bool, breaking: bool) -> None:
        assert cls.is_nonnegative is nonnegative
        assert cls.admits_breaking is breaking

    def test_string_values(self) -> None:
        assert str(OmegaClass.ZERO) == "zero"
        assert OmegaClass("general") is OmegaClass.GENERAL


class TestLabels:
    """Branch labels and halt reasons serialize to stable strings."""

    def test_branch_labels(self) -> None:
        assert str(BranchLabel.EXTREME_STOKES) == "ExtremeStokes"
        assert {str(label) for label in BranchLabel} == {
            "ExtremeStokes",
            "Solitary",
            "ExtremeSolitary",
            "Breaking",
            "Undecided",
        }

    def test_halt_reasons_round_trip(self) -> None:
        for reason in HaltReason:
            assert HaltReason(str(reason)) is reason

    def test_grid_kind(self) -> None:
        assert GridKind("stretched") is GridKind.STRETCHED


class TestBoundRecord:
    """BoundRecord report form."""

    def test_to_dict_keys(self) -> None:
        rec = BoundRecord("slope_half", "|eta'| <= 1/2", 0.1, True)
        assert rec.to_dict() == {
            "name": "slope_half",
            "anchor": "|eta'| <= 1/2",
            "margin": 0.1,
            "pass": True,
            "constant": None,
        }

    def test_is_immutable(self) -> None:
        rec = BoundRecord("x", "y", 0.0, False)
        with pytest.raises(AttributeError):
            rec.margin = 1.0  # type: ignore[misc]
