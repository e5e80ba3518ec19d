"""This module turns JSON model files (see core.models.model_file) into validated SplitSystem or LeslieModel
objects. Every failure is reported as a ParseError (not JSON) or a ModelValidationError naming the offending field."""

import re
from pathlib import Path
from typing import Union

from pydantic import ValidationError

from core.core_model import NonNegMatrix, SplitSystem, Tolerances, make_split
from core.errors import (DimensionMismatch, InputError, ModelValidationError,
                         ParseError, SubcriticalityViolated)
from core.models.model_file import (LeslieModelFile, ModelFile,
                                    SplitModelFile, ToleranceOverrides,
                                    model_file_adapter)
from engine.leslie import LeslieModel
from logger import build_logger

logger = build_logger(__name__)

_UNION_TAGS = {"split", "leslie", "finite", "geometric", "constant", "finite_list"}
_JSON_POSITION = re.compile(r"\s*at line (\d+) column (\d+)")


def _field_path(loc) -> str:
    path = [str(part) for part in loc if str(part) not in _UNION_TAGS]
    return ".".join(path) if path else "kind"


def _translate(error: ValidationError, prefix: str = "") -> ModelValidationError:
    first = error.errors()[0]
    field = _field_path(first["loc"])
    return ModelValidationError(f"{prefix}{field}" if prefix else field, first["msg"])


def read_source(source: Union[str, Path]) -> str:
    """
    :param source: A path to a model file, or the JSON text itself.
    :return: The JSON text.
    :raise ParseError: The file cannot be read or is not UTF-8.
    """
    if isinstance(source, str) and source.lstrip().startswith("{"):
        return source
    path = Path(source)
    try:
        return path.read_bytes().decode("utf-8")
    except UnicodeDecodeError as e:
        raise ParseError(f"{path}: byte {e.start}", "not valid UTF-8")
    except OSError as e:
        raise ParseError(str(path), e.strerror or str(e))


def _json_location(message: str) -> str:
    found = _JSON_POSITION.search(message)
    return f"line {found.group(1)} column {found.group(2)}" if found else "line 1 column 1"


def parse_model_file(text: str) -> ModelFile:
    """
    :param text: UTF-8 JSON text.
    :return: The schema-level model file, not yet checked for r(T) < 1.
    :raise ParseError
    :raise ModelValidationError
    """
    if not text.lstrip().startswith("{"):
        raise ParseError("line 1 column 1", "top-level value must be an object")
    try:
        return model_file_adapter.validate_json(text)
    except ValidationError as e:
        first = e.errors()[0]
        if first["type"] == "json_invalid":
            reason = first.get("ctx", {}).get("error", first["msg"])
            raise ParseError(_json_location(reason), _JSON_POSITION.sub("", reason))
        raise _translate(e)


def resolve_tolerances(overrides: Union[ToleranceOverrides, None]) -> Tolerances:
    """Environment tolerances, overridden field by field by the model file."""
    values = overrides.model_dump(exclude_none=True) if overrides else {}
    try:
        return Tolerances.from_env(**values)
    except ValidationError as e:
        raise _translate(e, "tolerances.")


def _split_from_file(model_file: SplitModelFile, tol: Tolerances) -> SplitSystem:
    matrices = {}
    for name in ("T", "F"):
        try:
            matrices[name] = NonNegMatrix(entries=getattr(model_file, name))
        except InputError as e:
            raise ModelValidationError(name, str(e))
    try:
        return make_split(matrices["T"], matrices["F"], tol)
    except DimensionMismatch as e:
        raise ModelValidationError("F", str(e))
    except SubcriticalityViolated as e:
        raise ModelValidationError("T", f"r(T) ≥ 1: r(T)={e.r_T!r} is not below {e.limit!r}")


def _leslie_from_file(model_file: LeslieModelFile, tol: Tolerances) -> LeslieModel:
    try:
        return LeslieModel(
            fertility=model_file.fertility,
            survival=model_file.survival,
            p=model_file.p,
            tolerances=tol,
        )
    except ValidationError as e:
        raise _translate(e)


def build_model(model_file: ModelFile) -> Union[SplitSystem, LeslieModel]:
    tol = resolve_tolerances(model_file.tolerances)
    if isinstance(model_file, SplitModelFile):
        return _split_from_file(model_file, tol)
    return _leslie_from_file(model_file, tol)


def parse_model(source: Union[str, Path]) -> Union[SplitSystem, LeslieModel]:
    """
    :param source: A path to a model file, or the JSON text itself.
    :return: The validated SplitSystem or LeslieModel.
    :raise ParseError
    :raise ModelValidationError
    """
    model = build_model(parse_model_file(read_source(source)))
    logger.debug(f"Parsed a {type(model).__name__} model.")
    return model
