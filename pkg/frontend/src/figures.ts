/**
 * The figure classes reconstructible from a run set: flux snapshots,
 * relative standard deviation, particle distributions, spatial figure of
 * merit, raw-vs-filtered closure functional, window centers, auxiliary
 * solutions, and relative error against a reference.
 */

import { RunDir, loadQuantity, loadRunDir, loadWindows, sliceStep } from "./csv.js";
import { Series } from "./svg.js";
import { ChartOptions, renderChart } from "./svg.js";

export const FIGURE_KINDS = [
  "flux",
  "rel_sdev",
  "particles",
  "fom",
  "sm",
  "windows",
  "aux_flux",
  "rel_error",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureRequest {
  name: string;
  quantity: FigureKind;
  runs: string[];
  steps: number[];
  out: string;
}

const MODE_COLORS: Record<string, string> = {
  analog: "#222222",
  "ww-previous": "#d95f02",
  "ww-losm-be": "#1b9e77",
  "ww-losm-cn": "#d62728",
  "ww-reference": "#1f77b4",
};

function colorFor(mode: string, i: number): string {
  const fallback = ["#7570b3", "#e7298a", "#66a61e", "#a6761d"];
  return MODE_COLORS[mode] ?? fallback[i % fallback.length];
}

function checkSameMesh(runs: RunDir[]): void {
  const cells = runs.map((r) => r.cells);
  if (new Set(cells).size > 1) {
    const desc = runs.map((r) => `${r.path} (${r.cells} cells)`).join(", ");
    throw new Error(`runs use different meshes: ${desc}`);
  }
}

interface QuantitySpec {
  file: string;
  yLabel: string;
  logY: boolean;
  title: string;
}

const QUANTITIES: Record<Exclude<FigureKind, "sm" | "windows">, QuantitySpec> = {
  flux: { file: "flux", yLabel: "scalar flux", logY: true, title: "Scalar flux" },
  rel_sdev: {
    file: "rel_sdev",
    yLabel: "relative standard deviation",
    logY: true,
    title: "Relative standard deviation",
  },
  particles: {
    file: "particles",
    yLabel: "census particles per cell",
    logY: false,
    title: "Particle distribution",
  },
  fom: { file: "fom", yLabel: "figure of merit", logY: true, title: "Spatial figure of merit" },
  aux_flux: {
    file: "aux_flux",
    yLabel: "auxiliary flux",
    logY: true,
    title: "Auxiliary solution",
  },
  rel_error: {
    file: "rel_error",
    yLabel: "relative error",
    logY: true,
    title: "Solution relative error",
  },
};

export function buildFigure(req: FigureRequest): string {
  if (req.runs.length === 0) throw new Error(`figure ${req.name}: no runs listed`);
  if (req.steps.length === 0) throw new Error(`figure ${req.name}: no steps listed`);
  const runs = req.runs.map(loadRunDir);
  checkSameMesh(runs);

  const series: Series[] = [];
  let tEnd: number | null = null;

  if (req.quantity === "sm") {
    // raw vs filtered closure functional: two curves per run
    for (const [i, run] of runs.entries()) {
      const raw = loadQuantity(run, "sm_raw");
      const filt = loadQuantity(run, "sm_filtered");
      for (const step of req.steps) {
        const a = sliceStep(raw, step);
        const b = sliceStep(filt, step);
        if (a.x.length === 0) throw new Error(`figure ${req.name}: run ${run.path} has no step ${step}`);
        tEnd = raw.find((r) => r.step === step)?.t ?? tEnd;
        series.push({ label: `${run.mode} raw`, x: a.x, y: a.y, color: colorFor(run.mode, i), width: 1 });
        series.push({
          label: `${run.mode} filtered`,
          x: b.x,
          y: b.y,
          color: colorFor(run.mode, i),
          dash: "6 3",
          width: 2,
        });
      }
    }
    return renderChart(series, {
      title: titleWithTime("Closure functional, raw vs filtered", req.steps, tEnd),
      xLabel: "x (cm)",
      yLabel: "second-moment functional",
      logY: false,
    });
  }

  if (req.quantity === "windows") {
    for (const [i, run] of runs.entries()) {
      const rows = loadWindows(run);
      for (const step of req.steps) {
        const sel = rows.filter((r) => r.step === step);
        if (sel.length === 0) throw new Error(`figure ${req.name}: run ${run.path} has no step ${step}`);
        tEnd = sel[0].t;
        series.push({
          label: `${run.mode} raw`,
          x: sel.map((r) => r.x),
          y: sel.map((r) => r.centerRaw),
          color: colorFor(run.mode, i),
          dash: "5 3",
          width: 1,
        });
        series.push({
          label: `${run.mode} modified`,
          x: sel.map((r) => r.x),
          y: sel.map((r) => r.centerModified),
          color: colorFor(run.mode, i),
          width: 2,
        });
      }
    }
    return renderChart(series, {
      title: titleWithTime("Weight window centers", req.steps, tEnd),
      xLabel: "x (cm)",
      yLabel: "window center",
      logY: true,
    });
  }

  const spec = QUANTITIES[req.quantity];
  for (const [i, run] of runs.entries()) {
    const rows = loadQuantity(run, spec.file);
    for (const step of req.steps) {
      const s = sliceStep(rows, step);
      if (s.x.length === 0) {
        throw new Error(`figure ${req.name}: run ${run.path} has no step ${step} in ${spec.file}.csv`);
      }
      tEnd = rows.find((r) => r.step === step)?.t ?? tEnd;
      const label = req.steps.length > 1 ? `${run.mode} (step ${step})` : run.mode;
      series.push({ label, x: s.x, y: s.y, color: colorFor(run.mode, i), width: 1.5 });
    }
  }
  const opts: ChartOptions = {
    title: titleWithTime(spec.title, req.steps, tEnd),
    xLabel: "x (cm)",
    yLabel: spec.yLabel,
    logY: spec.logY,
  };
  return renderChart(series, opts);
}

function titleWithTime(base: string, steps: number[], tEnd: number | null): string {
  if (tEnd === null) return base;
  return steps.length > 1 ? `${base} (steps ${steps.join(", ")})` : `${base} at t = ${tEnd} s`;
}
