"""
app_ifs.models

Dataclasses for spaces, systems, orbits and analysis results.
"""

from .capacity import (
    CapacityResult,
    CapacityTable,
    LsbpCertificate,
    OcapResult,
    PartitionOfUnity,
    SbpEntry,
    SbpReport,
    T2Result,
)
from .counts import CountEntry, CountGrid, CountResult, RateReport, ScaleRate, Theorem1Report
from .cover import (
    CompatibilityResult,
    Cover,
    CoverElement,
    FSigmaResult,
    MdimReport,
    PowerScalingRow,
    RefinementPool,
    RefinementResult,
    SubadditivityResult,
)
from .gallery import Expectation, ExpectationOutcome, GallerySystem
from .gluing import (
    ApEntry,
    CrossCheckReport,
    Gap,
    GopEntry,
    NonRecurrenceCertificate,
    OrbitSequence,
    RecurrenceEntry,
    RigidityReport,
    Segment,
    Tec1Report,
    Theorem3Certificate,
    TraceResult,
    Tracer,
    TraceSearch,
    TransitiveScan,
    UniformApReport,
)
from .metric import GHResult, GluedModel, MetricSpaceModel, MetricViolation, Point, Realization
from .orbit import OrbitPrefix, PrefixTable, SigmaGenerator
from .system import AdmissibilityGraph, FunctionSystem, PartialMap

__all__ = [
    # Spaces and systems
    "AdmissibilityGraph",
    "FunctionSystem",
    "GHResult",
    "GluedModel",
    "MetricSpaceModel",
    "MetricViolation",
    "PartialMap",
    "Point",
    "Realization",
    # Orbits
    "OrbitPrefix",
    "PrefixTable",
    "SigmaGenerator",
    # Counts
    "CountEntry",
    "CountGrid",
    "CountResult",
    "RateReport",
    "ScaleRate",
    "Theorem1Report",
    # Covers
    "CompatibilityResult",
    "Cover",
    "CoverElement",
    "FSigmaResult",
    "MdimReport",
    "PowerScalingRow",
    "RefinementPool",
    "RefinementResult",
    "SubadditivityResult",
    # Capacity
    "CapacityResult",
    "CapacityTable",
    "LsbpCertificate",
    "OcapResult",
    "PartitionOfUnity",
    "SbpEntry",
    "SbpReport",
    "T2Result",
    # Gluing
    "ApEntry",
    "CrossCheckReport",
    "Gap",
    "GopEntry",
    "NonRecurrenceCertificate",
    "OrbitSequence",
    "RecurrenceEntry",
    "RigidityReport",
    "Segment",
    "Tec1Report",
    "Theorem3Certificate",
    "TraceResult",
    "Tracer",
    "TraceSearch",
    "TransitiveScan",
    "UniformApReport",
    # Gallery
    "Expectation",
    "ExpectationOutcome",
    "GallerySystem",
]
