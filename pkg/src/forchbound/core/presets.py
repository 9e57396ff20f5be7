"""Central registry of law presets and field presets - single source of truth."""

from typing import Any, Dict, List, Tuple


class PresetRegistry:
    """Names, aliases and parameter signatures of every built-in preset."""

    # Alternative spellings mapped to canonical law names
    LAW_ALIASES = {
        "two-term": "two_term",
        "twoterm": "two_term",
        "forchheimer": "two_term",
        "three-term": "three_term",
        "threeterm": "three_term",
        "power": "power_law",
        "power-law": "power_law",
    }

    LAW_CONFIGS: Dict[str, Dict[str, Any]] = {
        "two_term": {
            "description": "g = a + b s (Darcy-Forchheimer)",
            "exponents": (0.0, 1.0),
            "coefficient_names": ("a", "b"),
        },
        "three_term": {
            "description": "g = a + b s + c s^2",
            "exponents": (0.0, 1.0, 2.0),
            "coefficient_names": ("a", "b", "c"),
        },
        "power_law": {
            "description": "g = a + b s^(m-1), 1 < m < 2",
            "exponents": None,
            "coefficient_names": ("a", "b"),
        },
        "custom": {
            "description": "user-given exponents and coefficients",
            "exponents": None,
            "coefficient_names": (),
        },
    }

    FIELD_ALIASES = {
        "ones": "one",
        "unit": "one",
        "linear": "linear_x",
        "gauss": "gauss_bump",
        "bump": "gauss_bump",
        "checkerboard": "checker",
    }

    # name -> ordered (parameter, default); None marks a required parameter
    FIELD_SIGNATURES: Dict[str, Tuple[Tuple[str, Any], ...]] = {
        "one": (),
        "linear_x": (),
        "gauss_bump": (
            ("cx", 0.5),
            ("cy", 0.5),
            ("sigma", 0.15),
            ("amp", 1.0),
            ("base", 0.0),
        ),
        "checker": (("v0", None), ("v1", None), ("blocks", 2)),
    }

    @classmethod
    def get_all_law_names(cls) -> List[str]:
        return list(cls.LAW_CONFIGS)

    @classmethod
    def resolve_law_alias(cls, name: str) -> str:
        lowered = name.strip().lower()
        return cls.LAW_ALIASES.get(lowered, lowered)

    @classmethod
    def is_valid_law(cls, name: str) -> bool:
        return cls.resolve_law_alias(name) in cls.LAW_CONFIGS

    @classmethod
    def get_law_config(cls, name: str) -> Dict[str, Any]:
        return cls.LAW_CONFIGS[cls.resolve_law_alias(name)]

    @classmethod
    def get_all_field_names(cls) -> List[str]:
        return list(cls.FIELD_SIGNATURES)

    @classmethod
    def resolve_field_alias(cls, name: str) -> str:
        lowered = name.strip().lower()
        return cls.FIELD_ALIASES.get(lowered, lowered)

    @classmethod
    def is_valid_field(cls, name: str) -> bool:
        return cls.resolve_field_alias(name) in cls.FIELD_SIGNATURES

    @classmethod
    def bind_field_args(cls, name: str, args: List[float]) -> Dict[str, float]:
        """Match positional preset arguments to named parameters.

        Raises ValueError on too many arguments or a missing required one.
        """
        canonical = cls.resolve_field_alias(name)
        signature = cls.FIELD_SIGNATURES[canonical]
        if len(args) > len(signature):
            raise ValueError(
                f"preset '{canonical}' takes at most {len(signature)} arguments, "
                f"got {len(args)}"
            )
        bound: Dict[str, float] = {}
        for i, (param, default) in enumerate(signature):
            if i < len(args):
                bound[param] = float(args[i])
            elif default is None:
                raise ValueError(f"preset '{canonical}' needs parameter '{param}'")
            else:
                bound[param] = float(default)
        return bound

    @classmethod
    def get_default_law(cls) -> str:
        return "two_term"
