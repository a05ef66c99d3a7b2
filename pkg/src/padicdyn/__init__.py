"""Exact p-adic arithmetic and dynamics of expanding polynomial maps.

Modules:

* :mod:`padicdyn.padic` -- Q_p at capped relative precision, norms, chordal metric
* :mod:`padicdyn.poly` -- polynomials, Taylor shifts, Newton-polygon root counts
* :mod:`padicdyn.disk` -- closed disks and regions
* :mod:`padicdyn.dynamics` -- expansion contexts, preimage disks, certificates
* :mod:`padicdyn.conjugacy` -- pointwise conjugacy by backward shadowing
* :mod:`padicdyn.symbolic` -- itineraries for z(z - 1)/p and the quadratic family
"""

from .conjugacy import (
    ConjugacyProblem,
    ShadowingTrace,
    conjugate_point,
    find_repelling_fixed_point,
    neighborhood_check,
    theorem_2_3_conjugacy,
    verify_semiconjugacy,
)
from .disk import Disk, Sphere, UnionOfDisks, parse_region
from .dynamics import (
    ExpansionContext,
    build_context,
    certify_backward_invariance,
    certify_expansion,
    mu_constant,
    preimage_disks,
    sphere_context,
    tau_threshold,
    verify_S_membership,
)
from .errors import *  # noqa: F401,F403
from .padic import (
    INFINITY,
    PadicNumber,
    Radius,
    chordal_distance,
    norm,
    parse_padic,
    parse_radius,
    parse_rational,
    sqrt,
)
from .poly import (
    Polynomial,
    derivative,
    evaluate,
    newton_root_count,
    parse_polynomial,
    perturb,
    taylor_shift,
    unique_root_in_disk,
)
from .symbolic import (
    ItineraryWord,
    corollary_4_2_pipeline,
    decode,
    itinerary,
    shift,
    shift_metric,
)

__version__ = "0.1.0"
