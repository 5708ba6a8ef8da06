"""Worked examples as data: structures, chains and expected displays.

Entries may be expressions in the example's parameters (``"-1/A"``,
``"(C-A*B)/A**2"``); they are evaluated exactly at the values listed under
``parameters`` in each file.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from ..exact import Matrix, Scalar
from ..jordan import JordanStructure
from ..subspace import ChainSpec

NAMES = ("A", "B", "C", "D", "E", "F", "G")


def evaluate(expr: str, params: dict) -> Scalar:
    try:
        return Scalar.parse(expr)
    except ValueError:
        pass
    import sympy

    value = sympy.sympify(expr, locals={k: sympy.Rational(v) for k, v in params.items()})
    value = sympy.nsimplify(value)
    re, im = value.as_real_imag()
    if not (re.is_Rational and im.is_Rational):
        raise ValueError(f"fixture entry {expr!r} is not a Gaussian rational")
    return Scalar(str(re), str(im))


class Fixture:
    def __init__(self, data: dict, params: dict | None = None):
        self.data = data
        self.name = data["name"]
        self.title = data.get("title", "")
        self.parameters = dict(data.get("parameters", {}))
        if params:
            self.parameters.update({k: str(v) for k, v in params.items()})

    def with_parameters(self, **params) -> "Fixture":
        return Fixture(self.data, {**self.parameters, **params})

    def value(self, expr) -> Scalar:
        return evaluate(str(expr), self.parameters)

    def matrix(self, rows) -> Matrix:
        return Matrix([[self.value(x) for x in row] for row in rows])

    def vector(self, entries) -> list[Scalar]:
        return [self.value(x) for x in entries]

    @property
    def structure(self) -> JordanStructure:
        return JordanStructure.from_data(self.data["structure"])

    @property
    def cases(self) -> list[str]:
        return list(self.data.get("cases", {}))

    def spec(self, case: str) -> ChainSpec:
        chains = self.data["cases"][case]["chains"]
        return ChainSpec(self.structure, [(self.vector(g), k) for g, k in chains])

    def expected(self, case: str | None, key: str):
        block = self.data["expect"] if case is None else self.data["cases"][case]["expect"]
        raw = block[key]
        if isinstance(raw, list) and raw and isinstance(raw[0], list):
            return self.matrix(raw)
        return raw

    def expects(self, case: str, key: str) -> bool:
        return key in self.data["cases"][case]["expect"]


@lru_cache(maxsize=None)
def _raw(name: str) -> str:
    return resources.files(__package__).joinpath(f"example_{name.lower()}.json").read_text()


def load(name: str, **params) -> Fixture:
    """Fixture for example ``name`` (``"A"`` ... ``"G"``), optionally overriding parameters."""
    key = name.upper().removeprefix("EXAMPLE")
    if key not in NAMES:
        raise KeyError(f"no fixture for example {name!r}")
    return Fixture(json.loads(_raw(key)), params)
