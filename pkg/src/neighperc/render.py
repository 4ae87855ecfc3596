"""Deterministic SVG rendering of configurations and dual explorations."""

from .explore import ExplorationRecord
from .lattice import DIR_NAMES, STEP
from .models import Configuration

MAX_RADIUS = 128
SCALE = 24
MARGIN = 16
PRIMAL = "#c0392b"
DUAL_OPEN = "#1f4fb4"
DUAL_CLOSED = "#7f9fd8"
PIVOTAL = "#1e9e3a"
CLUSTER_FILL = ("#fde2a7", "#c9e7f2", "#e3d3f2", "#d3f2d8", "#f6d0d0", "#e6e6e6")


def _fmt(x):
    return f"{x:.2f}".rstrip("0").rstrip(".")


class _Canvas:
    def __init__(self, center, radius):
        self.cx, self.cy = center
        self.r = radius + 1
        self.size = 2 * self.r * SCALE + 2 * MARGIN
        self.items = []

    def xy(self, x, y):
        return (MARGIN + (x - self.cx + self.r) * SCALE,
                MARGIN + (self.cy + self.r - y) * SCALE)

    def line(self, p, q, color, width=2.0, dashed=False, marker=True, attrs=""):
        (x1, y1), (x2, y2) = self.xy(*p), self.xy(*q)
        extra = ' stroke-dasharray="4 3"' if dashed else ""
        head = ' marker-end="url(#a)"' if marker else ""
        self.items.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{color}" stroke-width="{_fmt(width)}"{extra}{head}{attrs}/>')

    def rect(self, x, y, color):
        px, py = self.xy(x - 0.5, y + 0.5)
        self.items.append(f'<rect x="{_fmt(px)}" y="{_fmt(py)}" width="{SCALE}" '
                          f'height="{SCALE}" fill="{color}"/>')

    def dot(self, x, y, color, r=2.5, attrs=""):
        px, py = self.xy(x, y)
        self.items.append(f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="{_fmt(r)}" '
                          f'fill="{color}"{attrs}/>')

    def svg(self):
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.size}" '
                f'height="{self.size}" viewBox="0 0 {self.size} {self.size}">\n'
                '<defs><marker id="a" viewBox="0 0 10 10" refX="9" refY="5" '
                'markerWidth="4" markerHeight="4" orient="auto-start-reverse">'
                '<path d="M0 0L10 5L0 10z" fill="context-stroke"/></marker></defs>\n'
                f'<rect width="{self.size}" height="{self.size}" fill="#ffffff"/>\n')
        return head + "\n".join(self.items) + "\n</svg>\n"


def _draw_config(cv, config):
    if config.window.dim != 2:
        raise ValueError("only planar configurations can be rendered")
    for v in config.window.vertices():
        m = config.outcome(v)
        cv.dot(v[0], v[1], "#444444", 1.5)
        for i in range(4):
            if m >> i & 1:
                dx, dy = STEP[i]
                cv.line(v, (v[0] + 0.42 * dx, v[1] + 0.42 * dy), PRIMAL, 1.6,
                        attrs=f' data-v="{v[0]},{v[1]}" data-d="{DIR_NAMES[i]}"')


def _draw_record(cv, record):
    for k, cluster in enumerate(record.clusters):
        color = CLUSTER_FILL[k % len(CLUSTER_FILL)]
        for a, b in sorted(cluster):
            cv.rect(a + 0.5, b + 0.5, color)
    pivotal = {ev.step for ev in record.pivotal_events}
    for s in record.steps:
        (a, b), d = s.edge.tail, s.edge.direction
        dx, dy = STEP[d]
        p = (a + 0.5, b + 0.5)
        q = (a + 0.5 + 0.9 * dx, b + 0.5 + 0.9 * dy)
        if s.index in pivotal:
            cv.line(p, q, PIVOTAL, 3.2, dashed=not s.open, attrs=' data-pivotal="1"')
        else:
            cv.line(p, q, DUAL_OPEN if s.open else DUAL_CLOSED, 2.0, dashed=not s.open)
    a, b = record.start
    cv.dot(a + 0.5, b + 0.5, "#000000", 4.0, attrs=' data-origin="1"')


def render_svg(target, path=None, config=None):
    """SVG text for a Configuration or an ExplorationRecord (optionally drawn
    over its primal ``config``); written to ``path`` when given."""
    if isinstance(target, Configuration):
        win = target.window
    elif isinstance(target, ExplorationRecord):
        win = target.window
    else:
        raise TypeError("render_svg takes a Configuration or an ExplorationRecord")
    if win.radius > MAX_RADIUS:
        raise ValueError(f"window radius above {MAX_RADIUS} is too large to render")
    cv = _Canvas(win.center, win.radius)
    if isinstance(target, Configuration):
        _draw_config(cv, target)
    else:
        if config is not None:
            _draw_config(cv, config)
        _draw_record(cv, target)
    text = cv.svg()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text


__all__ = ["render_svg", "MAX_RADIUS"]
