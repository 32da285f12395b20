"""匹配模块 - 表头物种识别、单位后缀与数值单元格解析。"""

from carbon_tables.matching.header import (
    HeaderAnalysis,
    analyze_header,
    detect_species,
    extract_header_unit,
    remove_species,
)
from carbon_tables.matching.values import ParsedValue, format_value, parse_numeric_cell

__all__ = [
    "HeaderAnalysis",
    "ParsedValue",
    "analyze_header",
    "detect_species",
    "extract_header_unit",
    "format_value",
    "parse_numeric_cell",
    "remove_species",
]
