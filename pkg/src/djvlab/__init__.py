"""Deja vu lab: generating families, wavefronts and product spacetimes.

The package follows one story in three acts: Legendrian curves over the
circle and their positive isotopies (``jetcurves``, ``families``),
generating functions quadratic at infinity with sublevel persistence
and spectral invariants (``genfun``, ``persistence``), and product
spacetimes where the same certificates reappear as deja vu moments on
timelike curves (``hodograph``, ``lorentz``).  ``cli`` and ``scenes``
wrap it all behind deterministic scene files.
"""

from .jetcurves import (
    CurveError,
    IsotopyFrames,
    LegendrianCurve,
    classify_isotopy,
    contact_pairing,
    jet_graph,
    linear_isotopy,
    quotient_project,
    winding_number,
    zero_section,
)
from .persistence import Bar, Barcode, cubical_barcode, feature_modulus
from .genfun import (
    DjvCertificate,
    GenFunError,
    QuadAtInfinityFn,
    critical_points,
    djv_certificate,
    from_function,
    front_from_genfun,
    spectral_invariant,
    stabilized,
    sublevel_persistence,
)
from .families import (
    FamilyError,
    GenFunFamily,
    catalog_fig1,
    catalog_fig2,
    spectral_trace,
    suspend,
    suspension_family,
    track_barcodes,
    verify_quotient_djv,
)
from .hodograph import (
    CoSphereElement,
    HodographError,
    curve_from_plane,
    curve_to_plane,
    front_cusps,
    hodograph_forward,
    hodograph_inverse,
    render_front,
)
from .lorentz import (
    LorentzError,
    ProductSpacetime,
    RiemannianMetric,
    TimelikeCurve,
    causal_character,
    djv_moments,
    integrate_geodesic,
    null_geodesic,
    sky,
    two_bump_connecting_curve,
    two_bump_scenario,
    yxl_deviation,
)

__all__ = [
    "Bar",
    "Barcode",
    "CoSphereElement",
    "CurveError",
    "DjvCertificate",
    "FamilyError",
    "GenFunError",
    "GenFunFamily",
    "HodographError",
    "IsotopyFrames",
    "LegendrianCurve",
    "LorentzError",
    "ProductSpacetime",
    "QuadAtInfinityFn",
    "RiemannianMetric",
    "TimelikeCurve",
    "catalog_fig1",
    "catalog_fig2",
    "causal_character",
    "classify_isotopy",
    "contact_pairing",
    "critical_points",
    "cubical_barcode",
    "curve_from_plane",
    "curve_to_plane",
    "djv_certificate",
    "djv_moments",
    "feature_modulus",
    "from_function",
    "front_cusps",
    "front_from_genfun",
    "hodograph_forward",
    "hodograph_inverse",
    "integrate_geodesic",
    "jet_graph",
    "linear_isotopy",
    "null_geodesic",
    "quotient_project",
    "render_front",
    "sky",
    "spectral_invariant",
    "spectral_trace",
    "stabilized",
    "sublevel_persistence",
    "suspend",
    "suspension_family",
    "track_barcodes",
    "two_bump_connecting_curve",
    "two_bump_scenario",
    "verify_quotient_djv",
    "winding_number",
    "yxl_deviation",
    "zero_section",
]
