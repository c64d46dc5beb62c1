"""Reading and writing model files, run configs and extractor definitions."""
import json
import logging
from pathlib import Path
from typing import Any, Union

import aiofiles
import yaml

from archrecon.errors import ModelFileError
from archrecon.models.entity import strip_transient
from archrecon.models.value import finite_float, reject_constant, to_field_value

logger = logging.getLogger(__name__)

YAML_SUFFIXES = (".yaml", ".yml")


def dumps_model(model: Any, keep_transient: bool = False) -> str:
    """Canonical export: sorted keys, two-space indent, UTF-8, trailing newline."""
    if not keep_transient:
        model = strip_transient(model)
    try:
        return json.dumps(model, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"
    except ValueError as e:
        raise ModelFileError(f"model is not exportable: {e}")


def loads_model(text: str, origin: str = "<model>") -> Any:
    try:
        model = json.loads(text, parse_constant=reject_constant, parse_float=finite_float)
    except json.JSONDecodeError as e:
        raise ModelFileError(f"{origin}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}")
    except ValueError as e:
        raise ModelFileError(f"{origin}: invalid JSON: {e}")
    if not isinstance(model, dict):
        raise ModelFileError(f"{origin}: a model file must hold a JSON object")
    return model


def loads_document(text: str, origin: str) -> Any:
    """JSON, or YAML when the file name says so."""
    if origin.endswith(YAML_SUFFIXES):
        try:
            return to_field_value(yaml.safe_load(text))
        except yaml.YAMLError as e:
            raise ModelFileError(f"{origin}: invalid YAML: {e}")
    try:
        return json.loads(text, parse_constant=reject_constant, parse_float=finite_float)
    except json.JSONDecodeError as e:
        raise ModelFileError(f"{origin}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}")
    except ValueError as e:
        raise ModelFileError(f"{origin}: invalid JSON: {e}")


async def _read(path: Union[str, Path]) -> str:
    try:
        async with aiofiles.open(path, "r", encoding="utf-8") as f:
            return await f.read()
    except OSError as e:
        raise ModelFileError(f"cannot read {path}: {e.strerror or e}")


async def load_model(path: Union[str, Path]) -> Any:
    return loads_model(await _read(path), str(path))


async def load_document(path: Union[str, Path]) -> Any:
    return loads_document(await _read(path), str(path))


async def save_text(path: Union[str, Path], text: str) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        async with aiofiles.open(path, "w", encoding="utf-8") as f:
            await f.write(text)
    except OSError as e:
        raise ModelFileError(f"cannot write {path}: {e.strerror or e}")
    logger.debug("Wrote %s", path)


async def save_model(path: Union[str, Path], model: Any, keep_transient: bool = False) -> None:
    await save_text(path, dumps_model(model, keep_transient))


async def save_report(path: Union[str, Path], report: Any) -> None:
    await save_text(path, json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
