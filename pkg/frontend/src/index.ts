/**
 * Command-line entry: render one figure from an artifact directory.
 *
 *   node dist/index.js <readout|purity|grid-state|cavity> --data DIR --out FILE.svg
 */

import { writeFileSync } from "node:fs";

import {
  renderCavityFigure,
  renderGridStateFigure,
  renderPurityFigure,
  renderReadoutFigure,
} from "./figures.js";

const RENDERERS: Record<string, (dir: string) => string> = {
  readout: renderReadoutFigure,
  purity: renderPurityFigure,
  "grid-state": renderGridStateFigure,
  cavity: (dir) => renderCavityFigure(dir, 0),
};

export function main(argv: string[]): number {
  const [figure, ...rest] = argv;
  if (!figure || !(figure in RENDERERS)) {
    console.error(`usage: render <${Object.keys(RENDERERS).join("|")}> --data DIR --out FILE.svg`);
    return 2;
  }
  let data = "";
  let out = "";
  for (let i = 0; i < rest.length; i += 2) {
    if (rest[i] === "--data") data = rest[i + 1];
    else if (rest[i] === "--out") out = rest[i + 1];
    else {
      console.error(`unknown option ${rest[i]}`);
      return 2;
    }
  }
  if (!data || !out) {
    console.error("both --data and --out are required");
    return 2;
  }
  try {
    const svg = RENDERERS[figure](data);
    writeFileSync(out, svg);
    console.log(`wrote ${out}`);
    return 0;
  } catch (err) {
    console.error(`render failed: ${(err as Error).message}`);
    return 1;
  }
}

process.exit(main(process.argv.slice(2)));
