"""Verify PCB netlists against a component knowledge graph and system
templates, and benchmark netlist generators with Pass@k."""

from .circuit import Circuit, Component, Net, PinId, parse_circuit, serialize_circuit
from .constraints import Phase, Violation
from .errors import (CircuitError, DataError, DomainError, FormatError, HarnessError, KGError,
                     PcbVerifyError, TemplateError)
from .feedback import FeedbackLevel, render
from .kg import KnowledgeGraph, PartEntry, PinRole, parse_kg
from .stats import agreement_stats, pass_at_k, wilson_interval
from .topology import SystemTemplate, parse_template, verify

__version__ = "0.1.0"

__all__ = [
    "Circuit", "Component", "Net", "PinId", "parse_circuit", "serialize_circuit",
    "Phase", "Violation",
    "CircuitError", "DataError", "DomainError", "FormatError", "HarnessError", "KGError",
    "PcbVerifyError", "TemplateError",
    "FeedbackLevel", "render",
    "KnowledgeGraph", "PartEntry", "PinRole", "parse_kg",
    "agreement_stats", "pass_at_k", "wilson_interval",
    "SystemTemplate", "parse_template", "verify",
]
