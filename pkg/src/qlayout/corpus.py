"""Access to the circuit files bundled with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .circuit import Circuit, parse_qasm


def circuits_dir() -> Path:
    """Directory holding the bundled OpenQASM files."""
    return Path(str(resources.files("qlayout").joinpath("data", "circuits")))


def circuit_names() -> list[str]:
    return sorted(p.stem for p in circuits_dir().glob("*.qasm"))


def load_bundled(name: str) -> Circuit:
    """Load a bundled circuit by stem name (e.g. ``ghz_n4``)."""
    path = circuits_dir() / f"{name}.qasm"
    if not path.exists():
        raise FileNotFoundError(
            f"no bundled circuit {name!r}; available: {', '.join(circuit_names())}"
        )
    return parse_qasm(path.read_text(encoding="utf-8"))
