import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from ..core.box import Box, as_box
from ..section.net import Net
from ..skeleton.planar import Skeleton2D
from ..solve.roots import RootSet

logger = logging.getLogger(__name__)

SVG_NS = 'http://www.w3.org/2000/svg'


@dataclass(frozen=True)
class RenderStyle:
    """Canvas geometry and colors for SVG output."""

    canvas: int = 600
    margin: int = 20
    cell_fill: str = '#e8eef7'
    cell_stroke: str = '#b8c4d6'
    edge_stroke: str = '#1f3b73'
    edge_width: float = 1.5
    vertex_fill: str = '#1f3b73'
    vertex_radius: float = 3.0
    root_stroke: str = '#c0392b'
    root_size: float = 4.0
    site_fill: str = '#2e8b57'
    site_radius: float = 2.5

    @classmethod
    def from_config(cls, config: Optional[dict]) -> "RenderStyle":
        config = config or {}
        known = {k: v for k, v in config.items() if k in cls.__dataclass_fields__}
        return cls(**known)


class _Frame:
    """Affine map from the window to canvas pixels (y axis flipped)."""

    def __init__(self, window: Box, style: RenderStyle):
        (self.x0, _), (_, self.y1) = window.lower, window.upper
        wx, wy = window.widths
        self.margin = style.margin
        self.scale = (style.canvas - 2 * style.margin) / float(max(wx, wy))
        self.width = 2 * style.margin + self.scale * float(wx)
        self.height = 2 * style.margin + self.scale * float(wy)

    def __call__(self, z: complex):
        z = complex(z)
        return self.margin + self.scale * (z.real - self.x0), self.margin + self.scale * (self.y1 - z.imag)

    def describe(self) -> str:
        return (
            f"pixel = ({_fmt(self.margin)} + {_fmt(self.scale)}*(x - {_fmt(self.x0)}), "
            f"{_fmt(self.margin)} + {_fmt(self.scale)}*({_fmt(self.y1)} - y))"
        )


def _fmt(value: float) -> str:
    text = f"{float(value):.3f}".rstrip('0').rstrip('.')
    return '0' if text in ('-0', '') else text


def _points_attr(frame: _Frame, points: Iterable[complex]) -> str:
    return ' '.join(f"{_fmt(x)},{_fmt(y)}" for x, y in (frame(p) for p in points))


def render_svg(
    window,
    skeleton: Optional[Skeleton2D] = None,
    net: Optional[Net] = None,
    roots: Optional[RootSet] = None,
    style: Optional[RenderStyle] = None,
) -> str:
    """
    Render a planar skeleton with optional net sites and zero overlays.

    Cells are light polygons, skeleton edges <line> elements, skeleton
    vertices and net sites <circle> elements (classes 'vertex' and 'site')
    and each zero a single <path> cross. The window-to-pixel map is stated
    in the <desc> element. Output depends only on the inputs.

    Args:
        window: Planar window to draw
        skeleton: Skeleton2D (cells, edges, vertices)
        net: Net whose points are drawn as sites
        roots: RootSet drawn as crosses (only zeros inside the window)
        style: RenderStyle (defaults when None)

    Returns:
        SVG document text
    """
    window = as_box(window)
    style = style or RenderStyle()
    frame = _Frame(window, style)

    svg = ET.Element('svg', {
        'xmlns': SVG_NS,
        'width': _fmt(frame.width),
        'height': _fmt(frame.height),
        'viewBox': f"0 0 {_fmt(frame.width)} {_fmt(frame.height)}",
    })
    ET.SubElement(svg, 'desc').text = frame.describe()
    left, top = frame(complex(window.lower[0], window.upper[1]))
    right, bottom = frame(complex(window.upper[0], window.lower[1]))
    ET.SubElement(svg, 'rect', {
        'class': 'window', 'x': _fmt(left), 'y': _fmt(top),
        'width': _fmt(right - left), 'height': _fmt(bottom - top),
        'fill': 'none', 'stroke': '#888888',
    })

    if skeleton is not None:
        cells = ET.SubElement(svg, 'g', {'class': 'cells'})
        for cell in skeleton.cells:
            if len(cell.polygon) < 3:
                continue
            ring = [complex(x, y) for x, y in cell.polygon]
            ET.SubElement(cells, 'polygon', {
                'class': 'cell', 'data-index': str(cell.index), 'points': _points_attr(frame, ring),
                'fill': style.cell_fill, 'stroke': style.cell_stroke,
            })
        edges = ET.SubElement(svg, 'g', {'class': 'edges'})
        for edge in skeleton.edges:
            (x1, y1), (x2, y2) = frame(edge.start), frame(edge.end)
            ET.SubElement(edges, 'line', {
                'class': 'edge', 'x1': _fmt(x1), 'y1': _fmt(y1), 'x2': _fmt(x2), 'y2': _fmt(y2),
                'stroke': style.edge_stroke, 'stroke-width': _fmt(style.edge_width),
            })
        vertices = ET.SubElement(svg, 'g', {'class': 'vertices'})
        for vertex in skeleton.vertices:
            cx, cy = frame(vertex.point)
            ET.SubElement(vertices, 'circle', {
                'class': 'vertex', 'cx': _fmt(cx), 'cy': _fmt(cy), 'r': _fmt(style.vertex_radius),
                'fill': style.vertex_fill,
            })

    if net is not None:
        sites = ET.SubElement(svg, 'g', {'class': 'sites'})
        inside = net.points[window.contains(net.points[:, None])]
        for p in inside:
            cx, cy = frame(p)
            ET.SubElement(sites, 'circle', {
                'class': 'site', 'cx': _fmt(cx), 'cy': _fmt(cy), 'r': _fmt(style.site_radius),
                'fill': style.site_fill,
            })

    if roots is not None and len(roots):
        crosses = ET.SubElement(svg, 'g', {'class': 'roots'})
        z = roots.planar
        r = style.root_size
        for point in z[window.contains(z[:, None])]:
            x, y = frame(point)
            d = (
                f"M {_fmt(x - r)} {_fmt(y - r)} L {_fmt(x + r)} {_fmt(y + r)} "
                f"M {_fmt(x - r)} {_fmt(y + r)} L {_fmt(x + r)} {_fmt(y - r)}"
            )
            ET.SubElement(crosses, 'path', {'class': 'root', 'd': d, 'stroke': style.root_stroke, 'fill': 'none'})

    count = len(svg.findall('.//*'))
    logger.debug(f"Rendered SVG with {count} elements")
    return ET.tostring(svg, encoding='unicode')


def element_counts(document: str) -> dict:
    """Count drawn elements of a rendered document by class."""
    root = ET.fromstring(document)
    counts: dict = {}
    for element in root.iter():
        name = element.get('class')
        if name in ('cell', 'edge', 'vertex', 'site', 'root'):
            counts[name] = counts.get(name, 0) + 1
    return counts
