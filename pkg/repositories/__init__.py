# Repositories package

from .run_repository import RunRepository, config_hash, PACKAGE_VERSION
from .table_repository import TableRepository, TableFormatError

__all__ = [
    "RunRepository",
    "config_hash",
    "PACKAGE_VERSION",
    "TableRepository",
    "TableFormatError"
]
