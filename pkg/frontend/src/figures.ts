/**
 * The four figure renderers.  Each consumes the artifact directory of the
 * matching experiment (schemas defined by the simulator package) and
 * returns a complete SVG document string; no physics is recomputed here.
 */

import { join } from "node:path";

import {
  columnsWithPrefix,
  readColumnCsv,
  readJson,
  readWigner,
  SchemaError,
  WignerData,
} from "./csv.js";
import { document, linearScale, Panel } from "./svg.js";

const PW = 170; // panel width
const PH = 150; // panel height
const GAP = 62;

function wignerPanel(title: string, data: WignerData, xLabel = "x", yLabel = "p"): Panel {
  const p = new Panel(PW, PH, title);
  p.heatmap(data.xs, data.ps, data.values);
  p.axes(
    [data.xs[0], data.xs[data.xs.length - 1]],
    [data.ps[0], data.ps[data.ps.length - 1]],
    xLabel,
    yLabel,
  );
  return p;
}

/** Readout pipeline: state panels, outcome comb, conditional states. */
export function renderReadoutFigure(dataDir: string): string {
  const w = (stem: string) =>
    readWigner(join(dataDir, `${stem}.csv`), join(dataDir, `${stem}.axes.csv`));
  const meta = readJson(join(dataDir, "metadata.json"));
  const density = readColumnCsv(join(dataDir, "outcome_density.csv"), ["p_b", "density"]);
  const fid = readColumnCsv(join(dataDir, "conditional_fidelity.csv"), ["level", "fidelity"]);

  const row1 = [
    wignerPanel("initial signal", w("wigner_signal_initial")),
    wignerPanel("initial pump", w("wigner_pump_initial")),
    wignerPanel("final signal (unconditional)", w("wigner_signal_final")),
    wignerPanel("final pump", w("wigner_pump_final")),
  ];

  const pb = density.columns.get("p_b")!;
  const dens = density.columns.get("density")!;
  const comb = new Panel(PW, PH, "outcome density");
  const dmax = Math.max(...dens);
  const sx = linearScale([pb[0], 4.0], [0, PW]);
  const sy = linearScale([0, dmax * 1.05], [PH, 0]);
  comb.line(pb, dens, { color: "#2ca02c" }, sx, sy);
  comb.axes([pb[0], 4.0], [0, dmax * 1.05], "p_b", "P(p_b)");

  const levels = fid.columns.get("level")!;
  const fids = fid.columns.get("fidelity")!;
  const row2 = [comb];
  for (const N of [0, 1, 2]) {
    const idx = levels.indexOf(N);
    const f = idx >= 0 ? fids[idx] : NaN;
    row2.push(
      wignerPanel(`conditioned on level ${N} (F=${f.toFixed(3)})`, w(`wigner_conditional_${N}`)),
    );
  }

  const body: string[] = [];
  row1.forEach((p, i) => body.push(p.render(GAP + i * (PW + GAP), 50)));
  row2.forEach((p, i) => body.push(p.render(GAP + i * (PW + GAP), 50 + PH + 70)));
  const width = GAP + 4 * (PW + GAP);
  return document(
    width,
    50 + 2 * (PH + 70),
    body,
    `number readout through the pump (displacement/level d=${Number(meta.displacement_per_level).toFixed(2)})`,
  );
}

/** Measurement purity vs outcome for several probe widths. */
export function renderPurityFigure(dataDir: string): string {
  const table = readColumnCsv(join(dataDir, "purity.csv"), ["p_b"]);
  const curves = columnsWithPrefix(table, "purity_w");
  if (curves.length === 0) throw new SchemaError("purity.csv: no purity_w* columns");
  const pb = table.columns.get("p_b")!;
  const width = 430;
  const height = 280;
  const panel = new Panel(width, height, "");
  const sx = linearScale([0, Math.max(...pb)], [0, width]);
  const sy = linearScale([0.3, 1.02], [height, 0]);
  const colors = ["#9467bd", "#1f77b4", "#d62728", "#2ca02c"];
  const legend: string[] = [];
  curves.forEach(([name, values], i) => {
    const wlabel = name.replace("purity_w", "w = ");
    const isVacuum = name === "purity_w0.5";
    panel.line(pb, values, {
      color: isVacuum ? "#888888" : colors[i % colors.length],
      dash: isVacuum ? "5,3" : undefined,
      cls: isVacuum ? "ref" : "trace",
    }, sx, sy);
    legend.push(
      `<text x="${width - 120}" y="${18 + 14 * i}" font-size="10" ` +
        `fill="${isVacuum ? "#888888" : colors[i % colors.length]}">${wlabel}` +
        `${isVacuum ? " (vacuum probe)" : ""}</text>`,
    );
  });
  panel.parts.push(`<g class="legend">${legend.join("")}</g>`);
  panel.axes([0, Math.max(...pb)], [0.3, 1.02], "homodyne outcome p_b", "measurement purity");
  return document(
    width + 2 * GAP,
    height + 100,
    [panel.render(GAP, 50)],
    "purity of the number-readout measurement vs probe squeezing",
  );
}

/** Grid state: Wigner heatmap plus the two quadrature marginals. */
export function renderGridStateFigure(dataDir: string): string {
  const wig = readWigner(join(dataDir, "wigner_gkp.csv"), join(dataDir, "wigner_gkp.axes.csv"));
  const mx = readColumnCsv(join(dataDir, "marginal_x.csv"), ["x", "density"]);
  const mp = readColumnCsv(join(dataDir, "marginal_p.csv"), ["p", "density"]);
  const report = readJson(join(dataDir, "report.json"));

  const main = wignerPanel("Wigner function", wig);
  const xs = mx.columns.get("x")!;
  const dx = mx.columns.get("density")!;
  const top = new Panel(PW, 70, "position marginal");
  const sxX = linearScale([wig.xs[0], wig.xs[wig.xs.length - 1]], [0, PW]);
  top.line(xs, dx, { color: "#1f77b4" }, sxX, linearScale([0, Math.max(...dx) * 1.05], [70, 0]));
  top.axes([wig.xs[0], wig.xs[wig.xs.length - 1]], [0, Math.max(...dx) * 1.05], "x", "|psi|^2");

  const ps = mp.columns.get("p")!;
  const dp = mp.columns.get("density")!;
  const side = new Panel(PW, 70, "momentum marginal");
  side.line(ps, dp, { color: "#d62728" }, sxX, linearScale([0, Math.max(...dp) * 1.05], [70, 0]));
  side.axes([wig.xs[0], wig.xs[wig.xs.length - 1]], [0, Math.max(...dp) * 1.05], "p", "|psi~|^2");

  const note =
    `<g class="report"><text x="${GAP}" y="${50 + PH + 230}" font-size="10">` +
    `squeezing (stabilizer): x ${Number(report.db_x_stabilizer).toFixed(2)} dB, ` +
    `p ${Number(report.db_p_stabilizer).toFixed(2)} dB; ` +
    `tooth spacing ${Number(report.tooth_spacing_x).toFixed(3)}; ` +
    `fidelity to analytic comb ${Number(report.fidelity_to_analytic).toFixed(4)}</text></g>`;

  const body = [
    top.render(GAP, 50),
    main.render(GAP, 50 + 70 + 60),
    side.render(GAP + PW + GAP, 50 + 70 + 60),
    note,
  ];
  return document(
    2 * (PW + GAP) + GAP,
    50 + 70 + 60 + PH + 230 + 20,
    body,
    "grid state prepared by modular pump-position readout",
  );
}

/** Monitored cavity: level/pump traces with plateau levels, squeezing. */
export function renderCavityFigure(dataDir: string, trajectory = 0): string {
  const name = `trajectory_${String(trajectory).padStart(2, "0")}.csv`;
  const tr = readColumnCsv(join(dataDir, name), ["t", "level", "pump_p", "signal_db"]);
  const summary = readJson(join(dataDir, "summary.json"));
  const t = tr.columns.get("t")!;
  const level = tr.columns.get("level")!;
  const pump = tr.columns.get("pump_p")!;
  const db = tr.columns.get("signal_db")!;
  const width = 520;
  const height = 170;
  const tMax = t[t.length - 1];

  const pTop = new Panel(width, height, `conditional level and pump quadrature (trajectory ${trajectory})`);
  const levels: number[] = summary.stationary_levels;
  const pMax = Math.max(...levels.slice(0, 4), ...pump) + 0.3;
  const syP = linearScale([-0.2, pMax], [height, 0]);
  const sxT = linearScale([0, tMax], [0, width]);
  for (const lv of levels.slice(0, 4)) {
    pTop.hline(syP(lv), { color: "#999999", dash: "6,4", cls: "ref plateau-level" });
  }
  pTop.line(t, pump, { color: "#2ca02c", dash: "3,2" }, sxT, syP);
  pTop.line(t, level, { color: "#ff7f0e" }, sxT, syP);
  pTop.axes([0, tMax], [-0.2, pMax], "g t", "level (orange), pump p (green)");

  const pBot = new Panel(width, height, "conditional signal squeezing");
  const dbLo = Math.min(...db, -4) - 0.5;
  const dbHi = Math.max(...db, 1) + 0.5;
  const syD = linearScale([dbLo, dbHi], [height, 0]);
  pBot.hline(syD(0.0), { color: "#1f77b4", dash: "2,3", cls: "ref vacuum-level" });
  pBot.hline(syD(-3.0), { color: "#ff7f0e", dash: "2,3", cls: "ref steady-state-limit" });
  pBot.line(t, db, { color: "#1f77b4" }, sxT, syD);
  pBot.axes([0, tMax], [dbLo, dbHi], "g t", "x variance (dB)");

  const body = [pTop.render(GAP, 50), pBot.render(GAP, 50 + height + 70)];
  return document(
    width + 2 * GAP,
    50 + 2 * (height + 70),
    body,
    "monitored cavity trajectory: level plateaus and jumps",
  );
}
