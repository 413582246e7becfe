/** Linear and logarithmic axis scales with tick generation. */

export interface Scale {
  kind: "linear" | "log";
  domain: [number, number];
  range: [number, number];
  map(v: number): number;
  ticks(): number[];
  /** true when the value can be drawn on this scale */
  accepts(v: number): boolean;
}

function niceStep(span: number, target: number): number {
  const raw = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const m of [1, 2, 5, 10]) {
    if (raw <= m * mag) return m * mag;
  }
  return 10 * mag;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  let [d0, d1] = domain;
  if (d0 === d1) {
    d0 -= 1;
    d1 += 1;
  }
  const [r0, r1] = range;
  const k = (r1 - r0) / (d1 - d0);
  return {
    kind: "linear",
    domain: [d0, d1],
    range,
    map: (v) => r0 + (v - d0) * k,
    accepts: (v) => Number.isFinite(v),
    ticks: () => {
      const step = niceStep(d1 - d0, 6);
      const first = Math.ceil(d0 / step) * step;
      const out: number[] = [];
      for (let v = first; v <= d1 + 1e-12 * Math.abs(step); v += step) {
        out.push(Math.abs(v) < 1e-12 * step ? 0 : v);
      }
      return out;
    },
  };
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  let [d0, d1] = domain;
  if (!(d0 > 0) || !(d1 > 0)) {
    throw new Error("log scale needs a positive domain");
  }
  if (d0 === d1) {
    d0 /= 10;
    d1 *= 10;
  }
  const [r0, r1] = range;
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const k = (r1 - r0) / (l1 - l0);
  return {
    kind: "log",
    domain: [d0, d1],
    range,
    map: (v) => r0 + (Math.log10(v) - l0) * k,
    accepts: (v) => Number.isFinite(v) && v > 0,
    ticks: () => {
      const out: number[] = [];
      const eFirst = Math.ceil(l0 - 1e-9);
      const eLast = Math.floor(l1 + 1e-9);
      const stride = Math.max(1, Math.ceil((eLast - eFirst) / 8));
      for (let e = eFirst; e <= eLast; e += stride) out.push(Math.pow(10, e));
      return out.length >= 2 ? out : [d0, d1];
    },
  };
}

export function formatTick(v: number, kind: "linear" | "log"): string {
  if (v === 0) return "0";
  if (kind === "log" || Math.abs(v) >= 1e4 || Math.abs(v) < 1e-3) {
    const e = Math.floor(Math.log10(Math.abs(v)));
    const m = v / Math.pow(10, e);
    return Math.abs(m - 1) < 1e-9 ? `1e${e}` : `${m.toPrecision(2)}e${e}`;
  }
  return String(Number(v.toPrecision(6)));
}
