"""Gradient saliency maps and the focus ratio."""

from sdds_lab.explain.render import load_saliency, render_panel, save_saliency
from sdds_lab.explain.saliency import saliency, saliency_focus_score

__all__ = ["load_saliency", "render_panel", "saliency", "saliency_focus_score", "save_saliency"]
