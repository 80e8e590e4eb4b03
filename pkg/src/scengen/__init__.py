"""Scenario-based game generation: DSL parsing, static diagnostics,
compilation to runnable game bundles, and a deterministic turn-based
runtime for playing them."""

from .analyzer import Code, Diagnostic, DiagnosticReport, Severity, export_dot, validate
from .assets import AssetBinding, AssetCatalog, AssetEntry, bind_assets, load_manifest
from .compiler import (
    GameDefinition,
    RejectedScenario,
    VersionError,
    compile,
    diff_definitions,
    emit_bundle,
    load_bundle,
)
from .core import ScenarioDoc, ScenarioSummary, normalize, summary
from .engine import (
    GameSession,
    Outcome,
    Status,
    StepResult,
    apply_action,
    available_actions,
    run_script,
    start_session,
    tick,
)
from .harness import PathSet, PipelineMetrics, compare_runs, enumerate_paths, measure_pipeline
from .interchange import from_interchange, to_interchange
from .parser import ParseError, parse, parse_or_raise, serialize

__version__ = "0.1.0"

__all__ = [
    "AssetBinding",
    "AssetCatalog",
    "AssetEntry",
    "Code",
    "Diagnostic",
    "DiagnosticReport",
    "GameDefinition",
    "GameSession",
    "Outcome",
    "ParseError",
    "PathSet",
    "PipelineMetrics",
    "RejectedScenario",
    "ScenarioDoc",
    "ScenarioSummary",
    "Severity",
    "Status",
    "StepResult",
    "VersionError",
    "apply_action",
    "available_actions",
    "bind_assets",
    "compare_runs",
    "compile",
    "diff_definitions",
    "emit_bundle",
    "enumerate_paths",
    "export_dot",
    "from_interchange",
    "load_bundle",
    "load_manifest",
    "measure_pipeline",
    "normalize",
    "parse",
    "parse_or_raise",
    "run_script",
    "serialize",
    "start_session",
    "summary",
    "tick",
    "to_interchange",
    "validate",
]
