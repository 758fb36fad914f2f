"""
Instance documents.

{"nodes": [...],
 "edges": [{"id", "tail", "head", "a", "b", "d"}],
 "types": [{"id", "source", "sink", "demand", "r" | "r_edges": {edge: r}}],
 "undirected": bool,
 "paths": {type_id: [[edge, ...], ...]}}   # optional catalog override

Numbers may be given as decimals or as exact fractions ("4/21").
"""

import json
import logging
from pathlib import Path
from typing import Annotated, Optional, Union

from pydantic import BaseModel, BeforeValidator, ConfigDict, ValidationError, model_validator

from selfroute.core.constants import DEFAULT_PATH_CAP
from selfroute.core.errors import InstanceFormatError
from selfroute.core.model.cost import CostFunction
from selfroute.core.model.instance import Edge, GameInstance, UserType
from selfroute.core.utils import dump_json, parse_number

logger = logging.getLogger(__name__)

Number = Annotated[float, BeforeValidator(parse_number)]
Identifier = Annotated[str, BeforeValidator(str)]


class EdgeDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: Identifier
    tail: Identifier
    head: Identifier
    a: Number = 0.0
    b: Number = 0.0
    d: int = 1


class UserTypeDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: Identifier
    source: Identifier
    sink: Identifier
    demand: Number
    r: Optional[Number] = None
    r_edges: Optional[dict[Identifier, Number]] = None

    @model_validator(mode="after")
    def _one_uncertainty(self) -> "UserTypeDocument":
        if self.r is not None and self.r_edges is not None:
            raise ValueError(f"type {self.id} gives both 'r' and 'r_edges'")
        return self

    @property
    def uncertainty(self) -> Union[float, dict]:
        if self.r_edges is not None:
            return self.r_edges
        return 1.0 if self.r is None else self.r


class InstanceDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    nodes: list[Identifier]
    edges: list[EdgeDocument]
    types: list[UserTypeDocument]
    undirected: bool = False
    paths: Optional[dict[Identifier, list[list[Identifier]]]] = None

    def to_instance(self, path_cap: int = DEFAULT_PATH_CAP) -> GameInstance:
        edges = [
            Edge(e.id, e.tail, e.head, CostFunction(e.a, e.b, e.d)) for e in self.edges
        ]
        types = [
            UserType(t.id, t.source, t.sink, t.demand, t.uncertainty) for t in self.types
        ]
        return GameInstance.build(
            self.nodes,
            edges,
            types,
            undirected=self.undirected,
            paths=self.paths,
            path_cap=path_cap,
        )


def parse_instance(text: str, path_cap: int = DEFAULT_PATH_CAP) -> GameInstance:
    """
    Parse an instance document.

    Raises:
        InstanceFormatError: If the text is not valid JSON or violates the schema
        InvalidInstance: If the described game violates a construction invariant
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f"Malformed JSON: {e.msg}", e.lineno, e.colno) from e
    try:
        document = InstanceDocument.model_validate(raw)
    except ValidationError as e:
        raise InstanceFormatError(f"Invalid instance document: {e}") from e
    return document.to_instance(path_cap)


def load_instance(file_path: Union[str, Path], path_cap: int = DEFAULT_PATH_CAP) -> GameInstance:
    file_path = Path(file_path)
    try:
        text = file_path.read_text()
    except OSError as e:
        logger.error(f"Error reading instance file {file_path.as_posix()}: {e}")
        raise InstanceFormatError(f"Cannot read {file_path.as_posix()}: {e.strerror}") from e
    logger.info(f"Loaded instance document {file_path.as_posix()}")
    return parse_instance(text, path_cap)


def dump_instance(instance: GameInstance, include_paths: bool = False) -> str:
    return dump_json(instance.to_json(include_paths=include_paths))
