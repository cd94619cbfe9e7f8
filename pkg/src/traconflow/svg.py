"""Small deterministic SVG bar charts (text output, no plotting library)."""
from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 800, 360
MARGIN = dict(left=60, right=20, top=40, bottom=50)


def _f(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _frame(title: str, y_label: str, y_max: float, body: list[str], legend: list[tuple[str, str]]) -> str:
    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
        f'<text x="15" y="{(y0 + y1) // 2}" transform="rotate(-90 15 {(y0 + y1) // 2})" '
        f'text-anchor="middle">{escape(y_label)}</text>',
    ]
    for i in range(5):
        v = y_max * i / 4
        y = y0 - (y0 - y1) * i / 4
        out.append(f'<text x="{x0 - 5}" y="{_f(y + 4)}" text-anchor="end">{_f(v)}</text>')
    out += body
    for i, (color, name) in enumerate(legend):
        lx = x1 - 150
        ly = y1 + 14 * i
        out.append(f'<rect x="{lx}" y="{ly - 9}" width="10" height="10" fill="{color}"/>')
        out.append(f'<text x="{lx + 14}" y="{ly}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def grouped_bars(title: str, y_label: str, labels: Sequence[str],
                 series: Sequence[tuple[str, str, Sequence[float]]], max_labels: int = 24) -> str:
    """Bars grouped per label; ``series`` holds ``(name, color, values)``."""
    n = len(labels)
    y_max = max([max(v) for _, _, v in series if len(v)] + [1.0])
    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]
    group_w = (x1 - x0) / max(n, 1)
    bar_w = group_w * 0.8 / max(len(series), 1)
    body = []
    label_every = max(1, -(-n // max_labels))
    for i, lab in enumerate(labels):
        gx = x0 + i * group_w + group_w * 0.1
        for j, (_, color, values) in enumerate(series):
            h = (y0 - y1) * values[i] / y_max
            body.append(f'<rect x="{_f(gx + j * bar_w)}" y="{_f(y0 - h)}" width="{_f(bar_w)}" '
                        f'height="{_f(h)}" fill="{color}"/>')
        if i % label_every == 0:
            body.append(f'<text x="{_f(x0 + (i + 0.5) * group_w)}" y="{y0 + 15}" '
                        f'text-anchor="middle">{escape(str(lab))}</text>')
    return _frame(title, y_label, y_max, body, [(c, name) for name, c, _ in series])


def period_chart(periods) -> str:
    """Present, entering and rerouted counts per analysis period."""
    return grouped_bars(
        "Aircraft per period", "aircraft",
        [p.period_index for p in periods],
        [("present", "#4a7ab5", [p.present for p in periods]),
         ("entering", "#8cc084", [p.entering for p in periods]),
         ("rerouted", "#c0504d", [p.rerouted for p in periods])],
    )


def sweep_chart(rows) -> str:
    """Mean rerouting (dark) and waiting (light) time per cap, in minutes."""
    return grouped_bars(
        "Mean delay by TRACON cap", "minutes",
        [str(r.cap) for r in rows],
        [("rerouting", "#1f3b73", [r.mean_rerouting_s / 60 for r in rows]),
         ("waiting", "#a9c4eb", [r.mean_waiting_s / 60 for r in rows])],
    )
