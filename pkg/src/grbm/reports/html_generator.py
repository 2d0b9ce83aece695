"""
HTML report generator with Plotly visualizations.

Builds an interactive summary page from the CSV and JSON artifacts of one
experiment output directory. The page is a convenience view and is not listed
in the run manifest.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd
import plotly.graph_objects as go
from markupsafe import escape

from ..constants import MANIFEST_FILE


class HTMLReportGenerator:
    """
    Generate an HTML report for an experiment output directory.

    Creates one figure per recognized table:
    - Drift certificate samples (LV/V against radius)
    - TV decay curves
    - Penalty-limit distances
    - Rate-scaling constants
    - Decay exponents against dimension
    - Terminal-state marginals
    """

    def __init__(self, output_dir: str):
        """
        Initialize report generator.

        Args:
            output_dir: Directory written by one grbm experiment command
        """
        self.output_dir = Path(output_dir)

    def generate(self, output_path: Optional[Path] = None) -> str:
        """
        Generate the report.

        Args:
            output_path: Output file path (default: OUTPUT_DIR/report.html)

        Returns:
            Path to generated HTML file
        """
        if output_path is None:
            output_path = self.output_dir / "report.html"
        output_path = Path(output_path)
        output_path.parent.mkdir(parents=True, exist_ok=True)

        sections: List[Tuple[str, go.Figure]] = []
        for name, builder, heading in (
            ("drift_samples.csv", self._create_drift_scatter, "Drift certificate samples"),
            ("decay.csv", self._create_decay_curve, "Total-variation decay"),
            ("penalty.csv", self._create_penalty_curve, "Soft-to-hard penalty limit"),
            ("rate_scaling.csv", self._create_rate_scaling, "Rate scaling"),
            ("delta_table.csv", self._create_delta_table, "Decay exponent by dimension"),
            ("terminal_states.csv", self._create_marginals, "Terminal-state marginals"),
        ):
            path = self.output_dir / name
            if path.exists():
                sections.append((heading, builder(pd.read_csv(path))))

        html = self._build_html_report(self._load_summaries(), sections)
        with open(output_path, 'w', encoding='utf-8') as f:
            f.write(html)
        return str(output_path)

    def _load_summaries(self) -> Dict[str, Any]:
        """Every JSON artifact in the directory, keyed by file name."""
        summaries = {}
        for path in sorted(self.output_dir.glob("*.json")):
            with open(path, 'r') as f:
                summaries[path.name] = json.load(f)
        return summaries

    def _create_drift_scatter(self, frame: pd.DataFrame) -> go.Figure:
        fig = go.Figure(go.Scattergl(x=frame["radius"], y=frame["lv_over_v"], mode="markers",
                                     marker=dict(size=3, opacity=0.5)))
        fig.update_layout(xaxis_title="|x|", yaxis_title="LV/V", height=450)
        return fig

    def _create_decay_curve(self, frame: pd.DataFrame) -> go.Figure:
        fig = go.Figure(go.Scatter(x=frame["t"], y=frame["tv"], mode="lines+markers"))
        fig.update_layout(xaxis_title="t", yaxis_title="TV", yaxis_type="log", height=450)
        return fig

    def _create_penalty_curve(self, frame: pd.DataFrame) -> go.Figure:
        fig = go.Figure(go.Scatter(x=frame["beta"], y=frame["distance"], mode="lines+markers"))
        fig.update_layout(xaxis_title="beta", yaxis_title="KS distance", xaxis_type="log",
                          height=450)
        return fig

    def _create_rate_scaling(self, frame: pd.DataFrame) -> go.Figure:
        fig = go.Figure()
        for column, label in (("k_hard", "K^h (hard)"), ("k_soft", "K^s (soft)")):
            fig.add_trace(go.Scatter(x=frame["d"], y=frame[column], mode="lines+markers",
                                     name=label))
        fig.update_layout(xaxis_title="d", yaxis_title="rate", xaxis_type="log",
                          yaxis_type="log", height=450)
        return fig

    def _create_delta_table(self, frame: pd.DataFrame) -> go.Figure:
        fig = go.Figure(go.Scatter(x=frame["d"], y=frame["delta"], mode="lines+markers"))
        fig.update_layout(xaxis_title="d", yaxis_title="fitted delta", height=450)
        return fig

    def _create_marginals(self, frame: pd.DataFrame) -> go.Figure:
        fig = go.Figure()
        for column in [c for c in frame.columns if c.startswith("x")]:
            fig.add_trace(go.Histogram(x=frame[column], name=column, opacity=0.6,
                                       histnorm="probability density"))
        fig.update_layout(barmode="overlay", xaxis_title="state", height=450)
        return fig

    def _build_html_report(
        self,
        summaries: Dict[str, Any],
        sections: List[Tuple[str, go.Figure]]
    ) -> str:
        """Build complete HTML report with visualizations and summary tables."""

        fig_htmls = [
            f'<div class="section"><h2>{escape(heading)}</h2>'
            f'{fig.to_html(include_plotlyjs="cdn", full_html=False, div_id=f"plot_{i}")}</div>'
            for i, (heading, fig) in enumerate(sections)
        ]

        summary_rows = []
        for name, data in summaries.items():
            if name == MANIFEST_FILE or not isinstance(data, dict):
                continue
            for key, value in data.items():
                if isinstance(value, (dict, list)):
                    value = json.dumps(value)
                summary_rows.append(f"<tr><td>{escape(name)}</td><td>{escape(key)}</td>"
                                    f"<td>{escape(value)}</td></tr>")

        manifest = summaries.get(MANIFEST_FILE, {})
        return f"""<!DOCTYPE html>
<html lang="en">
<head>
    <meta charset="UTF-8">
    <title>GRBM experiment report: {escape(self.output_dir.name)}</title>
    <style>
        body {{
            font-family: -apple-system, BlinkMacSystemFont, 'Segoe UI', Roboto, sans-serif;
            max-width: 1200px;
            margin: 0 auto;
            padding: 20px;
            background: #f5f5f5;
        }}
        .header {{
            background: linear-gradient(135deg, #2c3e50 0%, #4ca1af 100%);
            color: white;
            padding: 30px;
            border-radius: 10px;
            margin-bottom: 30px;
        }}
        .section {{
            background: white;
            padding: 20px;
            border-radius: 8px;
            margin-bottom: 20px;
        }}
        table {{ border-collapse: collapse; width: 100%; }}
        td, th {{ border-bottom: 1px solid #ddd; padding: 6px; text-align: left; }}
    </style>
</head>
<body>
    <div class="header">
        <h1>GRBM experiment report</h1>
        <p><strong>Directory:</strong> {escape(str(self.output_dir))}</p>
        <p><strong>Config digest:</strong> {escape(manifest.get('config_digest', 'n/a'))}</p>
        <p><strong>Seed:</strong> {escape(manifest.get('seed', 'n/a'))}</p>
    </div>

    <div class="section">
        <h2>Summary</h2>
        <table>
            <thead><tr><th>File</th><th>Key</th><th>Value</th></tr></thead>
            <tbody>
                {''.join(summary_rows)}
            </tbody>
        </table>
    </div>

    {''.join(fig_htmls)}
</body>
</html>
"""
