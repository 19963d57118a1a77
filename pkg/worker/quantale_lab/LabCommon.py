import logging
from typing import Any, NamedTuple, Optional

logger = logging.getLogger(__name__)

_DEFAULTS = {
    'QLAB_ENDO_CAP': 6,
    'QLAB_CARRIER_CAP': 6,
    'QLAB_POINT_SOURCE_CAP': 8,
    'QLAB_SEED': 20020607,
    'QLAB_SAMPLE_COUNT': 200,
    'QLAB_COPRODUCT_TEST_FRAME_CAP': 8,
}


def lab_setting(name: str) -> Any:
    """
    Đọc một tham số QLAB_* từ Django settings, nếu không có thì dùng giá trị mặc định.
    """
    from django.conf import settings
    if name == 'QLAB_CORPUS_DIR':
        from pathlib import Path
        default = Path(__file__).resolve().parent / 'corpus'
        return Path(getattr(settings, name, default))
    return getattr(settings, name, _DEFAULTS[name])


class Finding(NamedTuple):
    """Kết quả kiểm tra một tính chất: đúng/sai kèm phản ví dụ (nếu có)."""
    holds: bool
    witness: Optional[Any] = None

    def __bool__(self):
        return self.holds


class QuantaleLabError(Exception):
    pass


class NotAPartialOrder(QuantaleLabError, ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotComplete(QuantaleLabError, ValueError):
    """Có một cặp phần tử không có cận trên nhỏ nhất hoặc cận dưới lớn nhất."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class CapExceeded(QuantaleLabError):
    pass


class DimensionMismatch(QuantaleLabError, ValueError):
    pass


class AlgebraMismatch(QuantaleLabError, ValueError):
    pass


class NotRightIdeal(QuantaleLabError, ValueError):
    pass


class InvalidHomomorphism(QuantaleLabError, ValueError):
    pass


class MissingStructure(QuantaleLabError, ValueError):
    pass


class NotDiagonal(QuantaleLabError, ValueError):
    pass


class BadBlockIndex(QuantaleLabError, IndexError):
    pass


class UnknownScenario(QuantaleLabError, KeyError):
    pass


class CorpusFormatError(QuantaleLabError, ValueError):
    pass
