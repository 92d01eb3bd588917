import json
import logging
import os
from typing import Type, TypeVar

from pydantic import BaseModel

from pareto_preprocess.core.schema import Instance

logger = logging.getLogger(__name__)

M = TypeVar("M", bound=BaseModel)


def read_model(path: str, model: Type[M]) -> M:
    """Reads a JSON file into a pydantic model."""
    logger.debug(f"Reading {model.__name__} from {path}")
    with open(path, "r", encoding="utf-8") as f:
        return model.model_validate(json.load(f))


def read_instance(path: str) -> Instance:
    return read_model(path, Instance)


def write_model(path: str, data: BaseModel) -> None:
    """Writes a model as indented JSON; identical models give identical bytes."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(data.model_dump_json(indent=2))
        f.write("\n")
    logger.info(f"Wrote {path}")


def write_text(path: str, text: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    logger.info(f"Wrote {path}")
