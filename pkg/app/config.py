from pydantic import Field
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # numeric tolerances
    tolerance: float = Field(1e-10, description="Default relative tolerance for residual checks")
    kernel_tolerance: float = Field(1e-9, description="Relative eigenvalue cut for Gram ranks")

    # size caps
    max_tensor_dim: int = Field(4096, description="Upper limit for d**n on any tensor level")
    dense_norm_max_dim: int = Field(2048, description="Above this, norms try ARPACK before dense SVD")
    permutation_cap: int = Field(6, description="Largest mode set averaged over all permutations")

    seed: int = Field(0, description="Seed for random vectors in verification suites")
    log_level: str = Field("INFO")
    report_schema: str = Field("1")

    # pydantic-settings configuration: env file and encoding
    model_config = {
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "env_prefix": "YBFOCK_",
        "extra": "ignore",
    }


# instantiate settings
settings = Settings()
