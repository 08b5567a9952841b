"""
Human summaries, rounded to a fixed number of significant digits
"""
import math
from typing import Any, Mapping, Optional

from stabilab.config import get_settings


def significant(value: Any, digits: Optional[int] = None) -> str:
    """Format numbers to ``digits`` significant digits, anything else with str()"""
    digits = digits or get_settings().summary_digits
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return str(getattr(value, "value", value))
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{digits}g}"


def format_summary(title: str, summary: Mapping[str, Any], digits: Optional[int] = None) -> str:
    width = max((len(key) for key in summary), default=0)
    lines = [title, "-" * len(title)]
    for key, value in summary.items():
        lines.append(f"{key.ljust(width)}  {significant(value, digits)}")
    return "\n".join(lines)
