"""
Design System
=============

Consistent console output and chart styling for every command: color tokens,
number formatting, section headers, status markers, pandas tables and
matplotlib figures written as reproducible SVG.
"""

import math
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

# =============================================================================
# DESIGN TOKENS
# =============================================================================

class Colors:
    """Chart palette"""
    PRIMARY = "#002561"
    SECONDARY = "#FF6600"

    SUCCESS = "#0F7B0F"
    WARNING = "#FF9800"
    DANGER = "#D32F2F"
    INFO = "#1976D2"

    DARK_GRAY = "#424242"
    GRID = "#f0f0f0"
    LINE = "#e0e0e0"

    CHART_COLORS = [
        "#002561",
        "#FF6600",
        "#0F7B0F",
        "#1976D2",
        "#7B1FA2",
        "#D32F2F",
        "#455A64",
    ]


class Typography:
    FONT_FAMILY = ["DejaVu Sans", "Arial", "sans-serif"]
    BODY_SIZE = 10
    TITLE_SIZE = 13
    RULE = "="
    WIDTH = 72


DEFAULT_DIGITS = 12


# =============================================================================
# CONSOLE OUTPUT
# =============================================================================

def format_number(value, digits: int = DEFAULT_DIGITS) -> str:
    """Fixed significant-digit rendering of floats, mpmath values and intervals"""
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, dict) and {"lo", "hi"} <= set(value):
        return f"[{format_number(value['lo'], digits)}, {format_number(value['hi'], digits)}]"
    try:
        number = float(value)
    except (TypeError, ValueError):
        return str(value)
    if math.isnan(number) or math.isinf(number):
        return str(number)
    return f"{number:.{digits}g}"


def create_section_header(title: str) -> str:
    rule = Typography.RULE * Typography.WIDTH
    return f"{rule}\n{title.upper()}\n{rule}"


def create_status_indicator(passed: bool, text: Optional[str] = None) -> str:
    mark = "PASS" if passed else "FAIL"
    return f"[{mark}] {text}" if text else f"[{mark}]"


def create_metric_table(rows: Iterable[Dict], columns: Optional[Sequence[str]] = None,
                        digits: int = DEFAULT_DIGITS) -> str:
    """Render a list of row dicts as an aligned text table"""
    frame = pd.DataFrame(list(rows), columns=list(columns) if columns else None)
    if frame.empty:
        return "(none)"
    for column in frame.columns:
        frame[column] = frame[column].map(lambda v: format_number(v, digits))
    return frame.to_string(index=False)


def create_key_value_table(values: Dict, digits: int = DEFAULT_DIGITS) -> str:
    return create_metric_table(({"quantity": k, "value": v} for k, v in values.items()), digits=digits)


# =============================================================================
# CHART STYLING
# =============================================================================

def get_chart_rc() -> Dict:
    """matplotlib rc settings shared by every figure"""
    return {
        "font.family": Typography.FONT_FAMILY,
        "font.size": Typography.BODY_SIZE,
        "axes.titlesize": Typography.TITLE_SIZE,
        "axes.titlecolor": Colors.PRIMARY,
        "axes.edgecolor": Colors.LINE,
        "axes.labelcolor": Colors.DARK_GRAY,
        "axes.grid": True,
        "grid.color": Colors.GRID,
        "axes.prop_cycle": matplotlib.cycler(color=Colors.CHART_COLORS),
        "legend.framealpha": 0.9,
        "legend.edgecolor": Colors.LINE,
        "svg.hashsalt": "moebius-cert",
        "svg.fonttype": "none",
    }


def styled_figure(title: str = "", figsize: Tuple[float, float] = (6.4, 6.4)):
    with plt.rc_context(get_chart_rc()):
        fig, ax = plt.subplots(figsize=figsize)
        if title:
            ax.set_title(title)
    return fig, ax


def save_svg(fig, path: Union[str, Path]) -> Path:
    """Write an SVG without a creation date so reruns are byte-identical"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(get_chart_rc()):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def create_region_chart(curves: Dict[str, List[Tuple[float, float]]], path: Union[str, Path],
                        title: str = "", xlabel: str = "b", ylabel: str = "t",
                        points: Optional[Dict[str, Tuple[float, float]]] = None) -> Path:
    """Closed boundary curves and labeled points in the plane"""
    fig, ax = styled_figure(title)
    for label, curve in curves.items():
        xs, ys = zip(*curve)
        ax.plot(xs, ys, linewidth=1.5, label=label)
    for label, (x, y) in (points or {}).items():
        ax.plot([x], [y], marker="o", linestyle="none", label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(loc="best")
    return save_svg(fig, path)
