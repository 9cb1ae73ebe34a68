"""Registry class for registering and initialising parametric families."""

import enum
from collections.abc import Sequence
from typing import Any


@enum.unique
class Categories(str, enum.Enum):
    COEFFICIENTS = "coefficients"
    CONSTRAINTS = "constraints"


class Registry:
    """Registry class."""

    _registry: dict[tuple[str, str], Any] = {}

    @classmethod
    def get(cls, category: str, key: str) -> Any:
        """Get the registered class.

        Args:
            category: category name
            key: value name

        Returns:
            required class
        """
        if (category, key) not in cls._registry:
            msg = f"Key {key} in category {category} has not been registered."
            raise ValueError(msg)

        return cls._registry[(category, key)]

    @classmethod
    def register(cls, category: str, name: str) -> Any:
        """Class method for decorating classes.

        Args:
            category: type of class
            name: specific class
        """

        def inner(new_cls: Any) -> Any:
            cls._registry[(category, name)] = new_cls
            return new_cls

        return inner

    @classmethod
    def keys(cls, category: str) -> list[str]:
        """Names registered under a category."""
        return sorted(key for cat, key in cls._registry if cat == category)

    @classmethod
    def build(cls, category: str, name: str, params: Sequence[float] = ()) -> Any:
        """Initialise and return required class.

        Args:
            category: category name
            name: value name
            params: family parameters

        Returns:
            initialised class
        """
        return cls.get(category, name)(tuple(float(p) for p in params))
