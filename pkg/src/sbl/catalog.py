"""Access to the shipped rule catalogs and move scripts.

The default files live in the package's ``catalog/`` directory; setting
``SBL_CATALOG`` to a directory overrides them, file by file.
"""

from __future__ import annotations

import os
from functools import lru_cache
from importlib import resources
from typing import Optional

from .rewrite import MoveScript, ScriptStep, parse_script_steps
from .rules import MoveRule, load_rule_catalog

M_RULES_FILE = "moves_M.rules"
DERIVED_RULES_FILE = "moves_derived.rules"
YOSHIKAWA_RULES_FILE = "moves_yoshikawa.rules"
OMEGA_SCRIPTS_FILE = "scripts_omega.txt"


def catalog_text(filename: str) -> str:
    override = os.environ.get("SBL_CATALOG")
    if override:
        path = os.path.join(override, filename)
        if os.path.exists(path):
            with open(path, encoding="utf-8") as fh:
                return fh.read()
    return (resources.files("sbl") / "catalog" / filename).read_text("utf-8")


def _load(filename: str) -> dict[str, MoveRule]:
    rules = load_rule_catalog(catalog_text(filename))
    return {r.name: r for r in rules}


@lru_cache(maxsize=None)
def m_rules() -> dict[str, MoveRule]:
    return _load(M_RULES_FILE)


@lru_cache(maxsize=None)
def derived_rules() -> dict[str, MoveRule]:
    return _load(DERIVED_RULES_FILE)


@lru_cache(maxsize=None)
def yoshikawa_rules() -> dict[str, MoveRule]:
    return _load(YOSHIKAWA_RULES_FILE)


@lru_cache(maxsize=None)
def all_rules() -> dict[str, MoveRule]:
    out: dict[str, MoveRule] = {}
    for loader in (m_rules, derived_rules, yoshikawa_rules):
        out.update(loader())
    return out


def classical_rules() -> dict[str, MoveRule]:
    """The plain Reidemeister moves, used on classical diagrams."""
    return {k: v for k, v in m_rules().items() if k in ("M1", "M2", "M3")}


@lru_cache(maxsize=None)
def omega_scripts() -> dict[str, MoveScript]:
    """Shipped realization scripts, keyed by move name."""
    text = catalog_text(OMEGA_SCRIPTS_FILE)
    out: dict[str, MoveScript] = {}
    name: Optional[str] = None
    body: list[str] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("script "):
            name = line.split()[1]
            body = []
        elif line == "end":
            out[name] = MoveScript(tuple(parse_script_steps(body)))
            name = None
        else:
            body.append(line)
    return out


def clear_caches() -> None:
    m_rules.cache_clear()
    derived_rules.cache_clear()
    yoshikawa_rules.cache_clear()
    all_rules.cache_clear()
    omega_scripts.cache_clear()
