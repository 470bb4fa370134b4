from pydantic import BaseModel, Field, RootModel, field_validator
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

VertexId = Union[str, int]
SlotRefRecord = Tuple[VertexId, int]


class VertexRecord(BaseModel):
    id: str = Field(..., min_length=1, description="Vertex id")
    coin: str = Field(..., min_length=1, description="Coin label")
    slots: int = Field(..., ge=1, description="Number of incident half-edge slots")
    column: Optional[int] = Field(None, description="Arrival timestep of the walker")
    wire: Optional[str] = Field(None, description="Wire label")

    @field_validator("id", mode="before")
    @classmethod
    def id_as_text(cls, v):
        return str(v) if isinstance(v, int) else v


class CoinRecord(BaseModel):
    matrix: List[List[Tuple[float, float]]] = Field(..., description="Row-major [re, im] pairs")
    phase: float = Field(default=0.0, description="Scalar phase in radians")


class GraphFile(BaseModel):
    vertices: List[VertexRecord]
    edges: List[Tuple[SlotRefRecord, SlotRefRecord]] = Field(default_factory=list)
    stubs: List[SlotRefRecord] = Field(default_factory=list)
    coins: Dict[str, CoinRecord] = Field(default_factory=dict)


class StateFile(RootModel[List[Tuple[VertexId, int, float, float]]]):
    """[vertex, slot, re, im] rows."""


class PortRecord(BaseModel):
    label: str
    rails: Tuple[SlotRefRecord, SlotRefRecord]


class PortsFile(BaseModel):
    inputs: List[PortRecord]
    outputs: List[PortRecord]
    depth: int = Field(..., ge=0)


class PlacementRecord(BaseModel):
    index: int
    kind: Literal["H", "P", "CNOT"]
    qubits: List[int]
    instances: int
    pairs: List[Tuple[str, str]]
    columns: Tuple[int, int]


class CoinDump(BaseModel):
    label: str
    degree: int
    phase: float
    matrix: List[List[Tuple[float, float]]]


class RunConfig(BaseModel):
    subcommand: Literal["coin", "gadget", "compile", "simulate", "verify", "pst"]
    inputs: List[str] = Field(default_factory=list, description="Input file paths or names")
    out: Optional[str] = Field(None, description="Output path; stdout when absent")
    tol: Optional[float] = Field(None, gt=0, description="Tolerance override")
    format: Literal["json", "csv", "pretty"] = "json"
    max_steps: Optional[int] = Field(None, ge=0)
    seed: Optional[int] = None
    options: Dict[str, Any] = Field(default_factory=dict, description="Subcommand options")
