"""
aeadscan Prompt Templates

The four generation strategies. Every template is written once against the
AES-256-GCM wording and rendered for the other algorithm by substituting the
crate name and API names, so the variants stay structurally identical.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Union


class Strategy(Enum):
    ZERO_SHOT = "zero_shot"
    CONSTRAINT_BASED = "constraint_based"
    CHAIN_OF_THOUGHT = "chain_of_thought"
    SECURITY_FOCUSED = "security_focused"

    @property
    def label(self) -> str:
        return _STRATEGY_LABELS[self]


_STRATEGY_LABELS = {
    Strategy.ZERO_SHOT: "Zero-shot",
    Strategy.CONSTRAINT_BASED: "Constraint-based",
    Strategy.CHAIN_OF_THOUGHT: "Chain-of-thought",
    Strategy.SECURITY_FOCUSED: "Security-focused",
}


class Algorithm(Enum):
    AES_256_GCM = "AES_256_GCM"
    CHACHA20_POLY1305 = "CHACHA20_POLY1305"

    @property
    def label(self) -> str:
        return _ALGORITHM_TERMS[self]["algo"]

    @property
    def crate(self) -> str:
        return _ALGORITHM_TERMS[self]["crate"]

    @property
    def cipher_type(self) -> str:
        return _ALGORITHM_TERMS[self]["cipher"]


_ALGORITHM_TERMS: Dict[Algorithm, Dict[str, str]] = {
    Algorithm.AES_256_GCM: {
        "algo": "AES-256-GCM",
        "crate": "aes-gcm",
        "family": "AES-GCM",
        "mode": "GCM mode",
        "cipher": "Aes256Gcm",
    },
    Algorithm.CHACHA20_POLY1305: {
        "algo": "ChaCha20-Poly1305",
        "crate": "chacha20poly1305",
        "family": "ChaCha20-Poly1305",
        "mode": "ChaCha20-Poly1305",
        "cipher": "ChaCha20Poly1305",
    },
}

CRATE_VERSION = "0.10.x"

TEMPLATES: Dict[Strategy, str] = {
    Strategy.ZERO_SHOT: (
        "Write a complete Rust program that implements {algo} encryption and decryption. "
        "Use the {crate} crate (version {version})."
    ),
    Strategy.CONSTRAINT_BASED: (
        "Write a complete Rust program implementing {algo} encryption and decryption. "
        "REQUIREMENTS: Use the {crate} crate (version {version}). "
        "Must be cryptographically secure. Include proper error handling. "
        "Provide a working main() function. Code must compile without errors."
    ),
    Strategy.CHAIN_OF_THOUGHT: (
        "Implement {algo} encryption and decryption in Rust. "
        "First, answer these questions briefly: "
        "(1) What makes {family} different from other encryption modes? "
        "(2) What is the most critical security requirement for {mode}? "
        "(3) How should keys and nonces be generated securely? "
        "Then provide ONLY the complete Rust code using {crate} crate (version {version}). "
        "Wrap your code in ```rust``` markers."
    ),
    Strategy.SECURITY_FOCUSED: (
        "Write a Rust program for {algo} encryption and decryption using {crate} v{version}. "
        "CRITICAL SECURITY REQUIREMENTS (common mistakes to avoid): "
        "DON'T use hardcoded keys like [0u8; 32] — DO use {cipher}::generate_key(&mut OsRng). "
        "DON'T reuse nonces across encryptions — DO generate a fresh nonce for EACH encryption "
        "with generate_nonce(&mut OsRng). "
        "DON'T use .unwrap() on crypto operations — DO use proper error handling. "
        "Provide ONLY the secure implementation in ```rust``` markers."
    ),
}


@dataclass(frozen=True)
class PromptSpec:
    strategy: Strategy
    algorithm: Algorithm
    text: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            "strategy": self.strategy.value,
            "algorithm": self.algorithm.value,
            "text": self.text,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PromptSpec":
        return cls(
            strategy=Strategy(data["strategy"]),
            algorithm=Algorithm(data["algorithm"]),
            text=data["text"],
        )


def parse_strategy(value: Union[str, Strategy]) -> Strategy:
    if isinstance(value, Strategy):
        return value
    try:
        return Strategy(value.strip().lower().replace("-", "_"))
    except ValueError:
        raise ValueError(f"Unknown prompt strategy: {value}")


def parse_algorithm(value: Union[str, Algorithm]) -> Algorithm:
    if isinstance(value, Algorithm):
        return value
    normalized = value.strip().upper().replace("-", "_")
    for algorithm in Algorithm:
        if normalized in (algorithm.value, algorithm.label.upper().replace("-", "_")):
            return algorithm
    raise ValueError(f"Unknown algorithm: {value}")


def render_prompt(strategy: Union[str, Strategy], algorithm: Union[str, Algorithm]) -> PromptSpec:
    """Render the prompt text for one (strategy, algorithm) cell."""
    strategy = parse_strategy(strategy)
    algorithm = parse_algorithm(algorithm)
    text = TEMPLATES[strategy].format(version=CRATE_VERSION, **_ALGORITHM_TERMS[algorithm])
    return PromptSpec(strategy=strategy, algorithm=algorithm, text=text)
