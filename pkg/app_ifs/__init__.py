"""
app_ifs

Toolkit for the dynamics of finite families of partial maps on finite
metric spaces: entropy, mean dimensions, orbit capacity and orbit gluing.
"""

__version__ = "0.1.0"

from .config import get_config
from .ifs_model import check_ifs, make_system
from .metric_core import make_model

__all__ = ["check_ifs", "get_config", "make_model", "make_system"]
