/**
 * figures.cfg parser: INI-style sections, one figure request per section.
 *
 *   [flux_late]
 *   quantity = flux
 *   runs = out/analog, out/wwcn
 *   steps = 19
 *   out = figures/flux_late.svg
 */

import { FIGURE_KINDS, FigureKind, FigureRequest } from "./figures.js";

export function parseFiguresConfig(text: string, baseOut = "."): FigureRequest[] {
  const requests: FigureRequest[] = [];
  let current: Partial<FigureRequest> & { name?: string } = {};
  const flush = () => {
    if (current.name === undefined) return;
    const { name, quantity, runs, steps, out } = current;
    if (!quantity || !runs || !steps || !out) {
      throw new Error(`figure [${name}] is missing one of quantity/runs/steps/out`);
    }
    requests.push({ name, quantity, runs, steps, out });
  };

  for (const rawLine of text.split(/\r?\n/)) {
    const line = rawLine.replace(/[;#].*$/, "").trim();
    if (!line) continue;
    const section = line.match(/^\[(.+)\]$/);
    if (section) {
      flush();
      current = { name: section[1].trim() };
      continue;
    }
    const kv = line.match(/^([\w.]+)\s*=\s*(.*)$/);
    if (!kv) throw new Error(`cannot parse line: ${rawLine}`);
    if (current.name === undefined) throw new Error(`key outside a [section]: ${rawLine}`);
    const [, key, value] = kv;
    switch (key) {
      case "quantity": {
        if (!(FIGURE_KINDS as readonly string[]).includes(value)) {
          throw new Error(`figure [${current.name}]: unknown quantity ${value!}`);
        }
        current.quantity = value as FigureKind;
        break;
      }
      case "runs":
        current.runs = value.split(",").map((s) => s.trim()).filter(Boolean);
        break;
      case "steps":
        current.steps = value.split(",").map((s) => {
          const n = Number(s.trim());
          if (!Number.isInteger(n) || n < 0) throw new Error(`bad step index ${s}`);
          return n;
        });
        break;
      case "out":
        current.out = value;
        break;
      default:
        throw new Error(`figure [${current.name}]: unknown key ${key}`);
    }
  }
  flush();
  if (requests.length === 0) throw new Error("figures config lists no figures");
  return requests;
}
