"""Special affine invariants of space curves: arc length, curvatures, canonical curves, reconstruction."""

from .canonical import (
    CaseLabel,
    FrenetMatrix,
    classify_case,
    closed_form,
    expm,
    frenet_matrix,
    generate_canonical,
    roundtrip_constants,
)
from .curve_model import CurveJet, SampledCurve, check_nondegenerate, estimate_jet, resample_uniform
from .errors import (
    AffineCurveError,
    BadInitialFrame,
    ClosedFormMismatch,
    DegenerateCurve,
    EmptyOverlap,
    GridTooShort,
    InvalidMap,
    NonPositiveMass,
    NonUniformGrid,
    Overflow,
    ParseError,
    RandomRejectionExhausted,
)
from .group import SpecialAffineMap, apply, compose, identity, invert, random_map
from .invariants import (
    AffineSignature,
    ArcLengthProfile,
    PullbackMatrix,
    UnimodularFrame,
    arc_length_curve,
    arc_length_profile,
    conservation_laws,
    curvatures,
    jet_signature,
    maurer_cartan_pullback,
    reparametrize,
    signature,
    smooth_arc_length_profile,
    unimodular_frame,
)
from .reconstruction import (
    EquivalenceReport,
    NaturalEquations,
    compare_signatures,
    integrate_frame,
    reconstruct_curve,
    solve_alignment_map,
    verify_equivalence,
)

__version__ = "0.1.0"
