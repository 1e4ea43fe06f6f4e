from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from divisum.config import settings


# Config Schemas
class CliConfig(BaseModel):
    """Schema for one command-line run"""

    precision_bits: int = Field(default=settings.PRECISION_BITS)
    base_N: int = Field(default=settings.BASE_N, ge=2)
    levels: int = Field(default=settings.LEVELS, ge=2)
    extrap_terms: int = Field(default=settings.EXTRAP_TERMS, ge=1)
    output_format: Literal["json", "csv", "text"] = settings.OUTPUT_FORMAT
    cache_dir: str = settings.CACHE_DIR
    jobs: int = Field(default=settings.JOBS, ge=1)
    rel_tol: float = Field(default=settings.REL_TOL, gt=0)
    omit_timings: bool = False

    @model_validator(mode="after")
    def check_schedule(self):
        if self.precision_bits < 64:
            raise ValueError(
                f"precision_bits must be at least 64, got {self.precision_bits}"
            )
        if self.levels <= self.extrap_terms:
            raise ValueError(
                f"levels ({self.levels}) must exceed extrap_terms ({self.extrap_terms})"
            )
        return self

    @classmethod
    def from_overrides(cls, **overrides) -> "CliConfig":
        """Settings defaults with every non-None override applied."""
        return cls(**{k: v for k, v in overrides.items() if v is not None})


# Verification Schemas
class ParamsResponse(BaseModel):
    """Schema for identity parameters"""

    d: int
    r1: int
    r2: int
    n: int


class LhsResponse(BaseModel):
    """Schema for the extrapolated left-hand side"""

    partials: list[tuple[int, str, str]]
    extrapolated: str | None = None
    err: str | None = None
    rigorous: bool
    failure: str | None = None


class CuspResponse(BaseModel):
    """Schema for the cusp-form part of the right-hand side"""

    weight: int
    dim: int
    a_n: list[str] = []


class RhsResponse(BaseModel):
    """Schema for the predicted right-hand side"""

    value: str
    err: str
    z_terms: str
    cusp: CuspResponse


class PrintedResponse(BaseModel):
    """Schema for a printed identity rescaled by its derived Γ-factor"""

    name: str
    gamma: str
    lhs: str
    rhs: str
    rhs_expression: str
    rhs_matches: bool
    cusp_matches: bool


class VerificationReportResponse(BaseModel):
    """Schema for one identity check"""

    model_config = ConfigDict(populate_by_name=True)

    params: ParamsResponse
    lhs: LhsResponse
    rhs: RhsResponse
    residual: str | None = None
    passed: bool = Field(alias="pass")
    printed: PrintedResponse | None = None
    wall_ms: float | None = None


class VerificationBatchResponse(BaseModel):
    """Schema for a list of identity checks"""

    reports: list[VerificationReportResponse]
    total: int
    passed: int


# Physics Schemas
class PhysicsReportResponse(BaseModel):
    """Schema for the physics cancellation check"""

    precision_bits: int
    value: str
    err: str
    route_d_value: str
    route_printed_value: str
    route_difference: str
    routes_agree_exactly: bool
    perturbation_shift: str
    tolerance: str
    passed: bool = Field(alias="pass")
    skipped: list[str] = Field(default_factory=list)
    wall_ms: float | None = None

    model_config = ConfigDict(populate_by_name=True)


# Cache Schemas
class EigenformCacheFile(BaseModel):
    """Schema for one cached weight"""

    weight: int
    M: int
    precision_bits: int
    forms: list[list[str]]


class CacheWarmResponse(BaseModel):
    """Schema for a cache warm-up run"""

    weights: list[int]
    files: list[str]


class CacheClearResponse(BaseModel):
    """Schema for a cache clear"""

    removed: int


# Table Schemas
class QTableResponse(BaseModel):
    """Schema for the closed form of Q"""

    d: int
    alpha: int
    beta: int
    P: list[str]
    R: list[str]
    C: str


class ZTableResponse(BaseModel):
    """Schema for one Z-term"""

    d: int
    alpha: int
    beta: int
    n: int
    expression: str
    value: str
    err: str


class EigenformRow(BaseModel):
    """Schema for one eigenform's leading coefficients"""

    weight: int
    index: int
    coefficients: list[str]


class LValueRow(BaseModel):
    """Schema for one completed L-value"""

    weight: int
    index: int
    s: int
    value: str
    err: str


class TableResponse(BaseModel):
    """Schema for eigenform and L-value tables"""

    kind: str
    rows: list[EigenformRow] | list[LValueRow]
