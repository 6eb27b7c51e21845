import os
import sys
from pathlib import Path

import pytest

# Add the repository root to sys.path for direct import during tests
ROOT_DIR = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT_DIR))

from ulamlab.utils.config import Config, set_config  # noqa: E402


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Each test sees built-in defaults and a private config file."""
    for key in list(os.environ):
        if key.startswith('ULAMLAB_'):
            monkeypatch.delenv(key)
    monkeypatch.setenv('ULAMLAB_CONFIG', str(tmp_path / 'config'))
    config = Config()
    set_config(config)
    yield config
    set_config(None)
