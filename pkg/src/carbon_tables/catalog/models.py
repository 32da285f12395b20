"""Materials Knowledge Base file schema."""

from __future__ import annotations

from enum import Enum
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

COMMON: Literal["Common"] = "Common"


class TechnologyCategory(str, Enum):
    """Carbon capture technology families."""

    LIQUID_ABSORPTION = "LiquidAbsorption"
    SOLID_ADSORPTION = "SolidAdsorption"
    MEMBRANE = "Membrane"
    HYDRATE = "Hydrate"
    CHEMICAL_LOOPING = "ChemicalLooping"


FomCategory = TechnologyCategory | Literal["Common"]


class ScalarMeasurement(BaseModel):
    """One curated value of a figure of merit."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    value: float
    unit: str = ""
    uncertainty: float | None = Field(default=None, ge=0.0)
    state: dict[str, float] = Field(default_factory=dict)


class MaterialRecord(BaseModel):
    """One material of the knowledge base."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    canonical_name: str = Field(min_length=1)
    smiles: str = ""
    synonyms: list[str] = Field(default_factory=list)
    categories: list[TechnologyCategory] = Field(default_factory=list)
    fom_values: dict[str, ScalarMeasurement] = Field(default_factory=dict)

    @field_validator("canonical_name")
    @classmethod
    def check_canonical_name(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("canonical_name_blank")
        return v

    @property
    def is_reference(self) -> bool:
        """Materials with curated values form the reference table."""
        return bool(self.fom_values)


class FomDefinition(BaseModel):
    """One figure of merit (or state variable) of the catalog."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    fom_id: str = Field(min_length=1, pattern=r"^[a-z0-9_]+$")
    display_name: str = Field(min_length=1)
    synonyms: list[str] = Field(default_factory=list)
    canonical_unit: str = ""
    category: FomCategory
    species: tuple[str, ...] = ()
    is_state_variable: bool = False
    catalog_position: int = Field(ge=0)

    @field_validator("species")
    @classmethod
    def check_species_unique(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        if len(set(v)) != len(v):
            raise ValueError("species_not_unique")
        return v

    @property
    def species_set(self) -> frozenset[str]:
        return frozenset(self.species)

    @property
    def group(self) -> str:
        """Catalog group used for field counts (liquid and solid share one)."""
        if self.category == COMMON:
            return COMMON
        if self.category in (
            TechnologyCategory.LIQUID_ABSORPTION,
            TechnologyCategory.SOLID_ADSORPTION,
        ):
            return "Sorption"
        return TechnologyCategory(self.category).value


class MaterialBaseFile(BaseModel):
    """Top-level layout of the MB JSON document."""

    model_config = ConfigDict(extra="forbid")

    materials: list[MaterialRecord]
    fom_catalog: list[FomDefinition]
    species_dictionary: dict[str, list[str]]
    reference_entry_count: int = Field(ge=0)
