"""Environment defaults and run-configuration files."""
from .settings import *
