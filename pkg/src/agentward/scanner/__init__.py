"""Static vetting of third-party skill packages."""

from .detectors import (
    DEFAULT_CONFIG,
    DETECTORS,
    DetectorConfig,
    ThreatPattern,
    detect_instruction_override,
)
from .package import PackageFile, SkillPackage, classify_file, load_package, package_from_files
from .report import DEFAULT_SEVERITY, Finding, ScanReport, scan_package, verdict_from_findings

__all__ = [
    "DEFAULT_CONFIG",
    "DEFAULT_SEVERITY",
    "DETECTORS",
    "DetectorConfig",
    "Finding",
    "PackageFile",
    "ScanReport",
    "SkillPackage",
    "ThreatPattern",
    "classify_file",
    "detect_instruction_override",
    "load_package",
    "package_from_files",
    "scan_package",
    "verdict_from_findings",
]
