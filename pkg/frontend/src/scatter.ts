import type { DistributionRow } from "./types.js";

/** SVG scatter of a pair's value distribution: x = enumerated count,
 * y = counting value, with the y=x diagonal for completeness reading.
 * Anomalous points (counting value below the enumerated count) are
 * highlighted. */
export function renderScatter(
  rows: DistributionRow[],
  width = 420,
  height = 320,
): SVGSVGElement {
  const pad = 36;
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));
  svg.setAttribute("data-testid", "scatter");

  const maxX = Math.max(1, ...rows.map((r) => r.n_e));
  const maxY = Math.max(1, ...rows.map((r) => r.v_c));
  const sx = (v: number) => pad + (v / maxX) * (width - 2 * pad);
  const sy = (v: number) => height - pad - (v / maxY) * (height - 2 * pad);

  const axis = document.createElementNS(svg.namespaceURI, "path");
  axis.setAttribute("d",
    `M ${pad} ${pad} L ${pad} ${height - pad} L ${width - pad} ${height - pad}`);
  axis.setAttribute("stroke", "#444");
  axis.setAttribute("fill", "none");
  svg.appendChild(axis);

  const diagMax = Math.min(maxX, maxY);
  const diag = document.createElementNS(svg.namespaceURI, "line");
  diag.setAttribute("x1", String(sx(0)));
  diag.setAttribute("y1", String(sy(0)));
  diag.setAttribute("x2", String(sx(diagMax)));
  diag.setAttribute("y2", String(sy(diagMax)));
  diag.setAttribute("stroke", "#9a9");
  diag.setAttribute("stroke-dasharray", "4 3");
  svg.appendChild(diag);

  for (const row of rows) {
    const dot = document.createElementNS(svg.namespaceURI, "circle");
    dot.setAttribute("cx", String(sx(row.n_e)));
    dot.setAttribute("cy", String(sy(row.v_c)));
    dot.setAttribute("r", "3");
    dot.setAttribute("fill", row.anomaly ? "#c43" : "#36c");
    dot.setAttribute("fill-opacity", "0.6");
    dot.setAttribute("data-anomaly", row.anomaly ? "1" : "0");
    const title = document.createElementNS(svg.namespaceURI, "title");
    title.textContent = `${row.subject}: ${row.n_e} listed vs ${row.v_c}`;
    dot.appendChild(title);
    svg.appendChild(dot);
  }
  return svg;
}
