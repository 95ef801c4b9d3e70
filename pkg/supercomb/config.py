import os
from pathlib import Path
from pydantic import BaseModel, ConfigDict


class Settings(BaseModel):
    model_config = ConfigDict(frozen=True)

    cache_dir: Path = Path('.supercomb-cache')  # where enumerated MLS streams are kept
    log_level: str = 'WARNING'                  # level for the CLI's stderr handler
    branches: int = 8                           # minimum number of subtrees for parallel counting

    @classmethod
    def from_env(cls) -> 'Settings':
        """ Read the settings from SUPERCOMB_* environment variables """
        values: dict[str, object] = {}
        if 'SUPERCOMB_CACHE_DIR' in os.environ:
            values['cache_dir'] = Path(os.environ['SUPERCOMB_CACHE_DIR'])
        if 'SUPERCOMB_LOG_LEVEL' in os.environ:
            values['log_level'] = os.environ['SUPERCOMB_LOG_LEVEL'].upper()
        if 'SUPERCOMB_BRANCHES' in os.environ:
            values['branches'] = int(os.environ['SUPERCOMB_BRANCHES'])
        return cls.model_validate(values)
