from enum import Enum
from math import pi
from typing import List

from pydantic import BaseModel, Field, model_validator


class GateKind(str, Enum):
    EXCHANGE = "exchange"
    F_TRIPLE = "f_triple"
    D_TRIPLE = "d_triple"
    XBAR = "xbar"
    ZBAR = "zbar"
    YBAR = "ybar"
    SWAP = "swap"


# Sitios que consume cada tipo de compuerta (X̄, Z̄, Ȳ viven en los tres primeros)
SITES_PER_KIND = {
    GateKind.EXCHANGE: 2,
    GateKind.SWAP: 2,
    GateKind.F_TRIPLE: 3,
    GateKind.D_TRIPLE: 3,
    GateKind.XBAR: 3,
    GateKind.ZBAR: 3,
    GateKind.YBAR: 3,
}


class GateSpec(BaseModel):
    kind: GateKind
    d: int = Field(default=3, ge=2)
    n: int = Field(default=3, ge=2)
    t: float = Field(default=pi / 4)
    sites: List[int] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_sites(self) -> "GateSpec":
        expected = SITES_PER_KIND[self.kind]
        if not self.sites:
            self.sites = list(range(expected))
        if len(self.sites) != expected:
            raise ValueError(f"{self.kind.value} requiere {expected} sitios, se recibieron {len(self.sites)}")
        if len(set(self.sites)) != len(self.sites):
            raise ValueError("Los sitios deben ser distintos")
        if any(s < 0 or s >= self.n for s in self.sites):
            raise ValueError(f"Sitios fuera de rango para n={self.n}: {self.sites}")
        if self.kind in (GateKind.XBAR, GateKind.ZBAR, GateKind.YBAR) and self.n != 3:
            raise ValueError("X̄, Z̄ e Ȳ se definen sobre n=3")
        return self
