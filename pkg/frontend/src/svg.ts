/**
 * Minimal deterministic SVG construction: linear scales, axes, line
 * traces, dashed reference lines, and diverging heatmaps.  No runtime
 * dependencies and no randomness or timestamps, so byte-identical inputs
 * yield byte-identical images.
 */

export interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const f = ((v: number) => r0 + ((v - d0) / (d1 - d0 || 1)) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.range = range;
  return f;
}

export function fmt(v: number, digits = 2): string {
  const s = v.toFixed(digits);
  return s === "-0.00" ? "0.00" : s;
}

export function ticks(lo: number, hi: number, count = 5): number[] {
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / count / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const inc = mult * step;
  const start = Math.ceil(lo / inc) * inc;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-12; v += inc) out.push(Math.round(v / inc) * inc);
  return out;
}

/** Diverging colormap symmetric about zero: blue, white, red. */
export function divergingColor(t: number): string {
  const clamp = (x: number) => Math.max(0, Math.min(1, x));
  const lerp = (a: number, b: number, u: number) => Math.round(a + (b - a) * clamp(u));
  let r: number, g: number, b: number;
  if (t < 0) {
    const u = clamp(-t);
    r = lerp(255, 33, u);
    g = lerp(255, 102, u);
    b = lerp(255, 172, u);
  } else {
    const u = clamp(t);
    r = lerp(255, 178, u);
    g = lerp(255, 24, u);
    b = lerp(255, 43, u);
  }
  const hex = (x: number) => x.toString(16).padStart(2, "0");
  return `#${hex(r)}${hex(g)}${hex(b)}`;
}

export class Panel {
  parts: string[] = [];
  constructor(
    public width: number,
    public height: number,
    public title: string,
  ) {}

  heatmap(xs: number[], ps: number[], values: number[][], maxCells = 96): Panel {
    const strideX = Math.max(1, Math.ceil(xs.length / maxCells));
    const strideP = Math.max(1, Math.ceil(ps.length / maxCells));
    let vmax = 0;
    for (const row of values) for (const v of row) vmax = Math.max(vmax, Math.abs(v));
    if (vmax === 0) vmax = 1;
    const sx = linearScale([xs[0], xs[xs.length - 1]], [0, this.width]);
    const sy = linearScale([ps[0], ps[ps.length - 1]], [this.height, 0]);
    const cw = (this.width / xs.length) * strideX + 0.5;
    const ch = (this.height / ps.length) * strideP + 0.5;
    const cells: string[] = [];
    for (let i = 0; i < ps.length; i += strideP) {
      for (let j = 0; j < xs.length; j += strideX) {
        const color = divergingColor(values[i][j] / vmax);
        if (color === "#ffffff") continue;
        cells.push(
          `<rect x="${fmt(sx(xs[j]))}" y="${fmt(sy(ps[i]) - ch)}" width="${fmt(cw)}" ` +
            `height="${fmt(ch)}" fill="${color}"/>`,
        );
      }
    }
    this.parts.push(`<g class="heatmap">${cells.join("")}</g>`);
    return this;
  }

  line(
    x: number[],
    y: number[],
    opts: { color?: string; dash?: string; width?: number; cls?: string } = {},
    sx?: Scale,
    sy?: Scale,
  ): Panel {
    sx = sx ?? linearScale([Math.min(...x), Math.max(...x)], [0, this.width]);
    sy = sy ?? linearScale([Math.min(...y), Math.max(...y)], [this.height, 0]);
    const pts = x.map((v, i) => `${fmt(sx!(v))},${fmt(sy!(y[i]))}`).join(" ");
    const dash = opts.dash ? ` stroke-dasharray="${opts.dash}"` : "";
    this.parts.push(
      `<polyline class="${opts.cls ?? "trace"}" points="${pts}" fill="none" ` +
        `stroke="${opts.color ?? "#1f77b4"}" stroke-width="${opts.width ?? 1.3}"${dash}/>`,
    );
    return this;
  }

  hline(yPix: number, opts: { color?: string; dash?: string; cls?: string } = {}): Panel {
    const dash = opts.dash ? ` stroke-dasharray="${opts.dash}"` : "";
    this.parts.push(
      `<line class="${opts.cls ?? "ref"}" x1="0" y1="${fmt(yPix)}" x2="${this.width}" ` +
        `y2="${fmt(yPix)}" stroke="${opts.color ?? "#888888"}" stroke-width="1"${dash}/>`,
    );
    return this;
  }

  marker(xPix: number, yPix: number, label: string): Panel {
    this.parts.push(
      `<g class="marker"><line x1="${fmt(xPix - 4)}" y1="${fmt(yPix - 4)}" x2="${fmt(xPix + 4)}" y2="${fmt(yPix + 4)}" stroke="#000000" stroke-width="1.4"/>` +
        `<line x1="${fmt(xPix - 4)}" y1="${fmt(yPix + 4)}" x2="${fmt(xPix + 4)}" y2="${fmt(yPix - 4)}" stroke="#000000" stroke-width="1.4"/>` +
        (label ? `<text x="${fmt(xPix + 6)}" y="${fmt(yPix - 6)}" font-size="9">${label}</text>` : "") +
        `</g>`,
    );
    return this;
  }

  axes(xDomain: [number, number], yDomain: [number, number], xLabel: string, yLabel: string): Panel {
    const sx = linearScale(xDomain, [0, this.width]);
    const sy = linearScale(yDomain, [this.height, 0]);
    const px: string[] = [
      `<rect x="0" y="0" width="${this.width}" height="${this.height}" fill="none" stroke="#333333" stroke-width="1"/>`,
    ];
    for (const t of ticks(xDomain[0], xDomain[1])) {
      const x = fmt(sx(t));
      px.push(`<line x1="${x}" y1="${this.height}" x2="${x}" y2="${this.height + 4}" stroke="#333333"/>`);
      px.push(`<text x="${x}" y="${this.height + 14}" font-size="9" text-anchor="middle">${fmt(t, 1)}</text>`);
    }
    for (const t of ticks(yDomain[0], yDomain[1])) {
      const y = fmt(sy(t));
      px.push(`<line x1="-4" y1="${y}" x2="0" y2="${y}" stroke="#333333"/>`);
      px.push(`<text x="-7" y="${y}" font-size="9" text-anchor="end" dominant-baseline="middle">${fmt(t, 1)}</text>`);
    }
    px.push(
      `<text x="${this.width / 2}" y="${this.height + 28}" font-size="10" text-anchor="middle">${xLabel}</text>`,
    );
    px.push(
      `<text x="-34" y="${this.height / 2}" font-size="10" text-anchor="middle" transform="rotate(-90 -34 ${this.height / 2})">${yLabel}</text>`,
    );
    this.parts.push(`<g class="axes">${px.join("")}</g>`);
    return this;
  }

  render(x: number, y: number): string {
    return (
      `<g class="panel" transform="translate(${x},${y})">` +
      `<text x="0" y="-8" font-size="11" font-weight="bold">${this.title}</text>` +
      this.parts.join("") +
      `</g>`
    );
  }
}

export function document(width: number, height: number, body: string[], title: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">` +
    `<rect width="${width}" height="${height}" fill="#ffffff"/>` +
    `<text x="${width / 2}" y="20" font-size="13" text-anchor="middle" font-weight="bold">${title}</text>` +
    body.join("") +
    `</svg>\n`
  );
}
