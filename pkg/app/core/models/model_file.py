from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter

from engine.leslie import Fertility, Survival


class ToleranceOverrides(BaseModel):
    """
    Attributes:
        tol_eq (Optional[float]): Defaults to the environment or 1e-9.
        tol_spec (Optional[float]): Defaults to the environment or 1e-10.
        tol_split (Optional[float]): Defaults to the environment or 1e-8.
        max_iter (Optional[int]): Defaults to the environment or 100000.
    """

    model_config = ConfigDict(extra="forbid")

    tol_eq: Optional[float] = Field(default=None, gt=0)
    tol_spec: Optional[float] = Field(default=None, gt=0)
    tol_split: Optional[float] = Field(default=None, gt=0)
    max_iter: Optional[int] = Field(default=None, ge=1)


class SplitModelFile(BaseModel):
    """
    Attributes:
        schema_version (str): "1".
        kind (str): "split".
        T (list of list of float): Row-major transition matrix.
        F (list of list of float): Row-major fertility matrix.
        tolerances (Optional[ToleranceOverrides]): Defaults to None.
    """

    schema_version: Literal["1"] = "1"
    kind: Literal["split"]
    T: List[List[float]]
    F: List[List[float]]
    tolerances: Optional[ToleranceOverrides] = None


class LeslieModelFile(BaseModel):
    """
    Attributes:
        schema_version (str): "1".
        kind (str): "leslie".
        fertility (Fertility): {"type": "finite", "values": [...]} or {"type": "geometric", "c": ..., "beta": ...}.
        survival (Survival): {"type": "constant", "t": ...} or {"type": "finite_list", "values": [...], "tail": ...}.
        p (float or "inf"): Defaults to 2.
        tolerances (Optional[ToleranceOverrides]): Defaults to None.
    """

    schema_version: Literal["1"] = "1"
    kind: Literal["leslie"]
    fertility: Fertility
    survival: Survival
    p: Union[Literal["inf"], float] = 2.0
    tolerances: Optional[ToleranceOverrides] = None


ModelFile = Annotated[Union[SplitModelFile, LeslieModelFile], Field(discriminator="kind")]

model_file_adapter = TypeAdapter(ModelFile)
