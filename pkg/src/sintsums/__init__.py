"""Counting sums of S-integers of bounded norm over Q and quadratic fields."""
from .census import (
    CensusResult,
    ExponentBox,
    brute_force_oracle,
    count_u,
    enumerate_V,
    enumerate_V_star,
    everest_count,
    run_census,
    saturation_check,
    subsum_ok,
)
from .ideals import IdealInventory, enumerate_ideal_inventory, generator_of
from .qfield import (
    Element,
    FieldError,
    FieldSpec,
    Place,
    PlaceSet,
    abs_at_place,
    field_norm,
    is_s_integer,
    make_field,
    make_place_set,
    s_norm,
)
from .report import RunConfig, compare, exponent_fit, main_term, verify
from .sunits import (
    SUnitGroup,
    canonical_associate,
    fundamental_unit,
    is_associate,
    roots_of_unity,
    s_regulator,
    s_unit_basis,
)
from .volume import build_halfspaces, c_constant, exact_volume, mc_volume

__version__ = "0.1.0"
