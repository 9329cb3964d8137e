"""
Escrita de SVG nativo para a figura da isola (sem dependência de plotagem).

Eixos normalizados: X = Re λ/ε³ e Y = (Im λ − σ − drift·ε²)/ε³, onde a
elipse assintótica tem semi-eixos fixos (|b30|, semi_major).
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, List, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["isola_svg", "write_isola_svg"]

WIDTH = 640
HEIGHT = 480
MARGIN = 48
COLORS = {"asymptotic": "#1f77b4", "direct": "#d62728", "ellipse": "#555555"}


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def _scaler(lo: float, hi: float, out_lo: float, out_hi: float):
    span = (hi - lo) or 1.0
    return lambda v: out_lo + (v - lo) * (out_hi - out_lo) / span


def _circles(points: Iterable[Tuple[float, float]], color: str, radius: float = 3.0) -> List[str]:
    return [
        f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{radius}" fill="none" stroke="{color}"/>'
        for x, y in points
    ]


def isola_svg(
    asymptotic: Sequence[complex],
    direct: Sequence[complex],
    eps: float,
    sigma: float,
    center_drift: float,
    semi_minor: float,
    semi_major: float,
    title: str = "",
) -> str:
    """
    Monta o documento SVG com a elipse e os dois conjuntos de pontos.

    Parameters
    ----------
    asymptotic, direct : sequence[complex]
        λ₊ assintótico e da matriz reduzida direta (NaN são ignorados).
    eps : float
    sigma, center_drift : float
        Centro iσ e deriva de ordem ε² do centro.
    semi_minor, semi_major : float
        Semi-eixos normalizados (real e imaginário).
    title : str

    Returns
    -------
    str
        Documento SVG completo.
    """
    e3 = eps**3

    def normalize(zs: Sequence[complex]) -> List[Tuple[float, float]]:
        out = []
        for z in zs:
            if np.isfinite(z.real) and np.isfinite(z.imag):
                out.append((z.real / e3, (z.imag - sigma - center_drift * eps**2) / e3))
        return out

    a_pts, d_pts = normalize(asymptotic), normalize(direct)
    xs = [p[0] for p in a_pts + d_pts] + [-semi_minor, semi_minor]
    ys = [p[1] for p in a_pts + d_pts] + [-semi_major, semi_major]
    pad_x = 0.1 * (max(xs) - min(xs) or 1.0)
    pad_y = 0.1 * (max(ys) - min(ys) or 1.0)
    sx = _scaler(min(xs) - pad_x, max(xs) + pad_x, MARGIN, WIDTH - MARGIN)
    sy = _scaler(min(ys) - pad_y, max(ys) + pad_y, HEIGHT - MARGIN, MARGIN)

    rx = abs(sx(semi_minor) - sx(0.0))
    ry = abs(sy(semi_major) - sy(0.0))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN}" y1="{_fmt(sy(0.0))}" x2="{WIDTH - MARGIN}" y2="{_fmt(sy(0.0))}" '
        'stroke="#cccccc"/>',
        f'<line x1="{_fmt(sx(0.0))}" y1="{MARGIN}" x2="{_fmt(sx(0.0))}" y2="{HEIGHT - MARGIN}" '
        'stroke="#cccccc"/>',
        f'<ellipse cx="{_fmt(sx(0.0))}" cy="{_fmt(sy(0.0))}" rx="{_fmt(rx)}" ry="{_fmt(ry)}" '
        f'fill="none" stroke="{COLORS["ellipse"]}" stroke-dasharray="4 3"/>',
    ]
    parts += _circles(((sx(x), sy(y)) for x, y in a_pts), COLORS["asymptotic"])
    parts += _circles(((sx(x), sy(y)) for x, y in d_pts), COLORS["direct"], radius=2.0)
    parts += [
        f'<text x="{MARGIN}" y="{MARGIN - 16}" font-size="14">{escape(title)}</text>',
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - 12}" font-size="12" text-anchor="end">'
        "Re λ / ε³</text>",
        f'<text x="12" y="{MARGIN - 4}" font-size="12">(Im λ − σ − drift·ε²) / ε³</text>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"


def write_isola_svg(path: str | Path, **kwargs) -> Path:
    """Grava `isola_svg(**kwargs)` em `path` (UTF-8) e devolve o caminho."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(isola_svg(**kwargs), encoding="utf-8")
    return out
