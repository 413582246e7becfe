/**
 * Readers for the simulator's output directories.
 *
 * Quantity CSVs carry `step,t,cell,x_center,value`; windows.csv swaps the
 * value column for center_raw,center_modified,floor,ceiling.  Every run
 * directory also holds manifest.json with the run mode and mesh echo.
 */

import { existsSync, readFileSync } from "fs";
import { join } from "path";

export interface QuantityRow {
  step: number;
  t: number;
  cell: number;
  x: number;
  value: number;
}

export interface WindowRow {
  step: number;
  t: number;
  cell: number;
  x: number;
  centerRaw: number;
  centerModified: number;
  floor: number;
  ceiling: number;
}

export interface RunDir {
  path: string;
  mode: string;
  cells: number;
  seed: number;
}

function splitLines(text: string): string[] {
  return text.split(/\r?\n/).filter((l) => l.length > 0);
}

export function parseQuantityCsv(text: string, source: string): QuantityRow[] {
  const lines = splitLines(text);
  if (lines[0] !== "step,t,cell,x_center,value") {
    throw new Error(`${source}: unexpected header ${JSON.stringify(lines[0])}`);
  }
  return lines.slice(1).map((line, i) => {
    const parts = line.split(",");
    if (parts.length !== 5) {
      throw new Error(`${source}: bad row ${i + 2}: ${line}`);
    }
    return {
      step: Number(parts[0]),
      t: Number(parts[1]),
      cell: Number(parts[2]),
      x: Number(parts[3]),
      value: Number(parts[4]),
    };
  });
}

export function parseWindowsCsv(text: string, source: string): WindowRow[] {
  const lines = splitLines(text);
  const expected = "step,t,cell,x_center,center_raw,center_modified,floor,ceiling";
  if (lines[0] !== expected) {
    throw new Error(`${source}: unexpected header ${JSON.stringify(lines[0])}`);
  }
  return lines.slice(1).map((line) => {
    const p = line.split(",").map(Number);
    return {
      step: p[0], t: p[1], cell: p[2], x: p[3],
      centerRaw: p[4], centerModified: p[5], floor: p[6], ceiling: p[7],
    };
  });
}

export function loadRunDir(path: string): RunDir {
  const manifestPath = join(path, "manifest.json");
  if (!existsSync(manifestPath)) {
    throw new Error(`run directory ${path} has no manifest.json`);
  }
  const manifest = JSON.parse(readFileSync(manifestPath, "utf8"));
  return {
    path,
    mode: manifest.config?.run?.mode ?? "unknown",
    cells: manifest.config?.domain?.cells ?? 0,
    seed: manifest.config?.mc?.seed ?? -1,
  };
}

export function loadQuantity(run: RunDir, quantity: string): QuantityRow[] {
  const file = join(run.path, `${quantity}.csv`);
  if (!existsSync(file)) {
    throw new Error(`run ${run.path} (${run.mode}) has no ${quantity}.csv`);
  }
  return parseQuantityCsv(readFileSync(file, "utf8"), file);
}

export function loadWindows(run: RunDir): WindowRow[] {
  const file = join(run.path, "windows.csv");
  if (!existsSync(file)) {
    throw new Error(`run ${run.path} (${run.mode}) has no windows.csv`);
  }
  return parseWindowsCsv(readFileSync(file, "utf8"), file);
}

/** Per-step slice as (x, value) arrays, preserving cell order. */
export function sliceStep(rows: QuantityRow[], step: number): { x: number[]; y: number[] } {
  const x: number[] = [];
  const y: number[] = [];
  for (const r of rows) {
    if (r.step === step) {
      x.push(r.x);
      y.push(r.value);
    }
  }
  return { x, y };
}

export function stepsIn(rows: QuantityRow[]): number[] {
  const seen = new Set<number>();
  for (const r of rows) seen.add(r.step);
  return [...seen].sort((a, b) => a - b);
}
