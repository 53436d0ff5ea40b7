"""Finite clusters of Poisson needle percolation with few orientations.

Exact union geometry for the contact regions, closed-form cluster
probability asymptotics with a nematic-regime classifier, a conditioned
process simulator, and an independent Monte Carlo integrator, plus the
``needle-perc`` command line runner on top.
"""

from .estimation import (
    CompositionQuery,
    bunch_offset_sample,
    cluster_probability,
    conditional_composition,
    convergence_study,
    cross_validate,
    integrate_F,
    uniformity_chisquare,
)
from .formulas import (
    MarkLaw,
    ThreeStateParams,
    TwoStateParams,
    classify_regime,
    cluster_decay_power,
    composition_limit,
    entropy_rate,
    spread_integral,
    three_state_cluster_prob,
    two_state_cluster_prob,
)
from .geometry import DirPair, Needle, SkewBox, union_area, union_area_same_dirs
from .process import (
    SimConfig,
    SimWindow,
    composition_histogram,
    compression_stats,
    origin_cluster,
    palm_sample,
    sample_ppp,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "CompositionQuery",
    "DirPair",
    "MarkLaw",
    "Needle",
    "SimConfig",
    "SimWindow",
    "SkewBox",
    "ThreeStateParams",
    "TwoStateParams",
    "bunch_offset_sample",
    "classify_regime",
    "cluster_decay_power",
    "cluster_probability",
    "composition_histogram",
    "composition_limit",
    "compression_stats",
    "conditional_composition",
    "convergence_study",
    "cross_validate",
    "entropy_rate",
    "integrate_F",
    "origin_cluster",
    "palm_sample",
    "sample_ppp",
    "spread_integral",
    "three_state_cluster_prob",
    "two_state_cluster_prob",
    "uniformity_chisquare",
    "union_area",
    "union_area_same_dirs",
]
