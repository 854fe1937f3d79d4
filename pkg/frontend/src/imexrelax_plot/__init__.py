from .csvdata import SchemaError, read_profiles, read_report
from .figures import FigureSpec, RenderResult, render

__all__ = ["SchemaError", "read_profiles", "read_report", "FigureSpec", "RenderResult", "render"]

__version__ = "0.1.0"
