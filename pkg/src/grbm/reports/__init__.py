"""
Report generation module.
"""

from .html_generator import HTMLReportGenerator
from .svg import Series, line_chart

__all__ = ['HTMLReportGenerator', 'Series', 'line_chart']
