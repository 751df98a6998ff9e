"""
Base Rule Architecture for aeadscan

Defines the abstract rule interface every detector implements, the shared
analysis context handed to rules, and the registry that discovers rule
modules.
"""

import importlib
import inspect
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Type

from ..findings import Finding, RuleId, Severity
from ..source import SourceUnit
from ..structure import (
    LoopBody,
    MaterialSink,
    NonceUse,
    ProvenanceState,
    extract_loop_bodies,
    find_material_sinks,
    find_nonce_uses,
    provenance_or_none,
)

logger = logging.getLogger(__name__)


@dataclass
class RuleConfig:
    """Static description of a rule."""
    rule_id: RuleId
    title: str
    description: str = ""
    remediation: str = ""
    enabled: bool = True

    @property
    def cwe(self) -> int:
        return self.rule_id.cwe

    @property
    def severity(self) -> Severity:
        return self.rule_id.severity


@dataclass
class AnalysisContext:
    """Per-unit state shared by all rules during one scan.

    Structural facts are computed on first use and cached, so nine rules over
    one file extract loops and encrypt calls once.
    """
    unit: SourceUnit
    notes: List[str] = field(default_factory=list)
    _loops: Optional[List[LoopBody]] = field(default=None, repr=False)
    _uses: Optional[List[NonceUse]] = field(default=None, repr=False)
    _sinks: Optional[List[MaterialSink]] = field(default=None, repr=False)
    _provenance: Dict[Any, Optional[ProvenanceState]] = field(default_factory=dict, repr=False)

    @property
    def loops(self) -> List[LoopBody]:
        if self._loops is None:
            self._loops = extract_loop_bodies(self.unit, self.notes)
        return self._loops

    @property
    def nonce_uses(self) -> List[NonceUse]:
        if self._uses is None:
            self._uses = find_nonce_uses(self.unit)
        return self._uses

    @property
    def sinks(self) -> List[MaterialSink]:
        if self._sinks is None:
            self._sinks = find_material_sinks(self.unit, self.nonce_uses)
        return self._sinks

    def provenance(self, variable: str, use_offset: int) -> Optional[ProvenanceState]:
        """Provenance of ``variable`` at ``use_offset``; None if undeclared."""
        key = (variable, use_offset)
        if key not in self._provenance:
            self._provenance[key] = provenance_or_none(self.unit, variable, use_offset)
        return self._provenance[key]


class BaseRule(ABC):
    """
    Abstract base class for all crypto-misuse rules.

    Subclasses set ``rule_id``, ``title`` and ``remediation`` as class
    attributes and implement ``check``.
    """

    rule_id: RuleId
    title: str = ""
    description: str = ""
    remediation: str = ""

    def __init__(self, config: Optional[RuleConfig] = None):
        self.config = config or RuleConfig(
            rule_id=self.rule_id,
            title=self.title,
            description=self.description,
            remediation=self.remediation,
        )

    @property
    def name(self) -> str:
        return self.rule_id.value

    @property
    def cwe(self) -> int:
        return self.rule_id.cwe

    @property
    def severity(self) -> Severity:
        return self.rule_id.severity

    @abstractmethod
    def check(self, context: AnalysisContext) -> List[Finding]:
        """Return this rule's findings for ``context.unit``."""
        pass

    def finding(self, context: AnalysisContext, offset: int, message: str,
                end: Optional[int] = None) -> Finding:
        unit = context.unit
        if end is None:
            end = unit.code_text.find('\n', offset)
            if end < 0:
                end = len(unit)
        return Finding(
            rule_id=self.rule_id,
            location=unit.offset_to_location(offset),
            message=message,
            snippet=unit.snippet(offset, end),
            path=unit.path,
        )

    def info(self) -> Dict[str, Any]:
        return {
            'rule_id': self.name,
            'cwe': self.cwe,
            'severity': self.severity.value,
            'title': self.config.title,
            'description': self.config.description,
            'remediation': self.config.remediation,
        }


class RuleRegistry:
    """Registry of available rule classes."""

    def __init__(self):
        self._rules: Dict[str, Type[BaseRule]] = {}
        self._instances: Dict[str, BaseRule] = {}

    def register(self, rule_class: Type[BaseRule]):
        """Register a rule class under its rule id."""
        name = rule_class.rule_id.value
        if name in self._rules and self._rules[name] is not rule_class:
            logger.debug("Replacing rule %s with %s", name, rule_class.__name__)
        self._rules[name] = rule_class
        self._instances.pop(name, None)

    def get_rule(self, name: str) -> Optional[BaseRule]:
        if name not in self._rules:
            return None
        if name not in self._instances:
            self._instances[name] = self._rules[name]()
        return self._instances[name]

    def list_rules(self) -> List[str]:
        """Registered rule ids in declaration order of RuleId."""
        order = [rule_id.value for rule_id in RuleId]
        return sorted(self._rules, key=lambda name: order.index(name) if name in order else len(order))

    def rules(self) -> List[BaseRule]:
        return [self.get_rule(name) for name in self.list_rules()]

    def get_rule_info(self, name: str) -> Optional[Dict[str, Any]]:
        rule = self.get_rule(name)
        return rule.info() if rule else None

    def discover_rules(self):
        """Auto-discover and register rules from `*_rules.py` modules in this package."""
        rules_dir = Path(__file__).parent

        for rule_file in sorted(rules_dir.glob("*_rules.py")):
            module_name = f"{__package__}.{rule_file.stem}"

            try:
                module = importlib.import_module(module_name)
            except ImportError as e:
                logger.warning("Skipping rule module %s: %s", module_name, e)
                continue

            for _, obj in inspect.getmembers(module, inspect.isclass):
                if (issubclass(obj, BaseRule) and
                        obj is not BaseRule and
                        not inspect.isabstract(obj) and
                        not obj.__name__.startswith('_')):
                    self.register(obj)
