"""Request models for the service endpoints.

Probabilities travel as strings ("1/2", "0.25") or JSON numbers and are
parsed to exact rationals server-side; responses carry exact values
back as "a/b" strings.
"""

from __future__ import annotations

from typing import List, Optional, Union

from pydantic import BaseModel, Field

ProbabilityIn = Union[str, float, int]


class RankRequest(BaseModel):
    matrix: str  # matrix text format: "rows cols" line, then 0/1 rows
    method: str = "rational"  # "rational" | "modular"
    prime: Optional[int] = None  # modular method only


class LevyRequest(BaseModel):
    weights: List[float]
    p: ProbabilityIn
    r: float = Field(ge=0)


class ThresholdRequest(BaseModel):
    weights: List[float]
    p: ProbabilityIn
    L: float = Field(ge=1)


class BracketRequest(BaseModel):
    rows: List[List[float]]  # k x n, orthonormal rows
    p: ProbabilityIn
    r: float = Field(ge=0)


class LkrRequest(BaseModel):
    weights: List[float]
    p: ProbabilityIn
    r_i: List[float]
    r: float
    C: float = 10.0


class ThetaRequest(BaseModel):
    rows: List[List[float]]  # k x n, orthonormal rows
    p: ProbabilityIn
    C: float = 10.0
    verify: bool = False


class RinvRequest(BaseModel):
    rows: List[List[float]]  # n x m, rank n
    mode: str = "exhaustive"


class ClassifyRequest(BaseModel):
    vector: List[float]
    delta: float
    rho: float


class EnumerateRequest(BaseModel):
    n: int = Field(ge=1)
    p: ProbabilityIn


class McRequest(BaseModel):
    n: int = Field(ge=1)
    k: int = Field(ge=0)
    p: ProbabilityIn
    trials: int = Field(ge=1)
    seed: int = Field(ge=0)


class BoundsRequest(BaseModel):
    n_values: List[int]
    k: int = Field(ge=1)
    p: ProbabilityIn
    epsilon: ProbabilityIn = 0


class FixedVectorRequest(BaseModel):
    v_columns: List[List[float]]  # n x k, orthonormal columns
    p: ProbabilityIn
    c: float = Field(ge=0)
    trials: int = Field(ge=1)
    seed: int = Field(ge=0)
