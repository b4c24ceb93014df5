"""Figure rendering for rashare sweep outputs."""

from .render import KINDS, PALETTE, FigureSpec, RenderError, render

__version__ = "0.1.0"
