from .output import SCHEMAS, OutputTable, Writer, parse_table, read_json, read_table

__all__ = ["SCHEMAS", "OutputTable", "Writer", "parse_table", "read_json", "read_table"]
