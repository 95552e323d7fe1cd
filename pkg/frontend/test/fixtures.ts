/** Synthetic artifact directories matching the simulator's CSV schemas. */

import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export function tempDir(): string {
  return mkdtempSync(join(tmpdir(), "figtest-"));
}

export function writeWigner(dir: string, stem: string, nx = 6, np = 5): void {
  const rows: string[] = [];
  for (let i = 0; i < np; i++) {
    const row: number[] = [];
    for (let j = 0; j < nx; j++) row.push(Math.sin(i + 1) * Math.cos(j + 1) * 0.5);
    rows.push(row.map((v) => v.toFixed(6)).join(","));
  }
  writeFileSync(join(dir, `${stem}.csv`), `# synthetic wigner\n${rows.join("\n")}\n`);
  const axes = ["axis,index,value"];
  for (let j = 0; j < nx; j++) axes.push(`x,${j},${(-2 + j * 0.8).toFixed(3)}`);
  for (let i = 0; i < np; i++) axes.push(`p,${i},${(-2 + i * 1.0).toFixed(3)}`);
  writeFileSync(join(dir, `${stem}.axes.csv`), `# axes\n${axes.join("\n")}\n`);
}

export function readoutFixture(): string {
  const dir = tempDir();
  for (const stem of [
    "wigner_signal_initial",
    "wigner_pump_initial",
    "wigner_signal_final",
    "wigner_pump_final",
    "wigner_conditional_0",
    "wigner_conditional_1",
    "wigner_conditional_2",
  ])
    writeWigner(dir, stem);
  const pb = [];
  for (let k = 0; k < 40; k++)
    pb.push(`${(-1 + k * 0.125).toFixed(3)},${(Math.exp(-((k - 16) ** 2) / 40)).toFixed(6)},0.9995`);
  writeFileSync(
    join(dir, "outcome_density.csv"),
    `# units: none\np_b,density,kraus_fidelity\n${pb.join("\n")}\n`,
  );
  writeFileSync(
    join(dir, "conditional_fidelity.csv"),
    "# binned\nlevel,window_lo,window_hi,probability,fidelity\n" +
      "0,0,1,0.44,0.991\n1,1,2,0.19,0.923\n2,2,3,0.15,0.958\n",
  );
  writeFileSync(
    join(dir, "metadata.json"),
    JSON.stringify({ displacement_per_level: 1.0, fidelities: { "0": 0.991 } }),
  );
  return dir;
}

export function purityFixture(): string {
  const dir = tempDir();
  const rows: string[] = [];
  for (let k = 0; k <= 60; k++) {
    const p = k * 0.1;
    rows.push(`${p.toFixed(2)},${(0.6).toFixed(4)},${(0.9).toFixed(4)},${(0.99).toFixed(4)}`);
  }
  writeFileSync(
    join(dir, "purity.csv"),
    `# formula: tr(F^2)/tr(F)^2\np_b,purity_w0.5,purity_w0.25,purity_w0.125\n${rows.join("\n")}\n`,
  );
  return dir;
}

export function gridStateFixture(): string {
  const dir = tempDir();
  writeWigner(dir, "wigner_gkp", 8, 8);
  const mx: string[] = [];
  for (let k = 0; k <= 50; k++) mx.push(`${(-5 + k * 0.2).toFixed(2)},${Math.exp(-((k - 25) ** 2) / 30).toFixed(6)}`);
  writeFileSync(join(dir, "marginal_x.csv"), `# marginal\nx,density\n${mx.join("\n")}\n`);
  writeFileSync(
    join(dir, "marginal_p.csv"),
    `# marginal\np,density\n${mx.join("\n")}\n`,
  );
  writeFileSync(
    join(dir, "report.json"),
    JSON.stringify({
      db_x_stabilizer: 15.03,
      db_p_stabilizer: 14.97,
      tooth_spacing_x: 2.5042,
      fidelity_to_analytic: 0.9966,
    }),
  );
  return dir;
}

export function cavityFixture(): string {
  const dir = tempDir();
  const rows: string[] = [];
  for (let k = 0; k <= 200; k++) {
    const t = k * 0.5;
    const level = t < 50 ? 1.0 : 0.0;
    const pump = t < 50 ? 1.5 : 0.5;
    const db = t < 50 ? -1.0 : -5.2;
    rows.push(`${t.toFixed(2)},${level.toFixed(4)},${pump.toFixed(4)},${db.toFixed(4)},0.1`);
  }
  writeFileSync(
    join(dir, "trajectory_00.csv"),
    `# trajectory\nt,level,pump_p,signal_db,current\n${rows.join("\n")}\n`,
  );
  writeFileSync(
    join(dir, "summary.json"),
    JSON.stringify({ stationary_levels: [0.5, 1.5, 2.5, 3.5, 4.5], jump_times: { "0": [25.0] } }),
  );
  return dir;
}
