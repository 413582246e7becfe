/**
 * Figure renderer CLI.
 *
 *   node dist/cli.js --config figures.cfg
 *   node dist/cli.js --quantity flux --runs out/analog,out/wwcn --steps 19 --out flux.svg
 */

import { mkdirSync, readFileSync, writeFileSync } from "fs";
import { dirname } from "path";

import { parseFiguresConfig } from "./config.js";
import { FIGURE_KINDS, FigureKind, FigureRequest, buildFigure } from "./figures.js";

function parseArgs(argv: string[]): Map<string, string> {
  const out = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`bad arguments near ${key}`);
    }
    out.set(key.slice(2), argv[i + 1]);
  }
  return out;
}

export function main(argv: string[]): number {
  let requests: FigureRequest[];
  try {
    const args = parseArgs(argv);
    if (args.has("config")) {
      requests = parseFiguresConfig(readFileSync(args.get("config")!, "utf8"));
    } else {
      const quantity = args.get("quantity");
      if (!quantity || !(FIGURE_KINDS as readonly string[]).includes(quantity)) {
        throw new Error(
          `--quantity must be one of ${FIGURE_KINDS.join(", ")} (or use --config figures.cfg)`,
        );
      }
      requests = [
        {
          name: quantity,
          quantity: quantity as FigureKind,
          runs: (args.get("runs") ?? "").split(",").filter(Boolean),
          steps: (args.get("steps") ?? "").split(",").filter(Boolean).map(Number),
          out: args.get("out") ?? `${quantity}.svg`,
        },
      ];
    }
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }

  let failures = 0;
  for (const req of requests) {
    try {
      const svg = buildFigure(req);
      mkdirSync(dirname(req.out) || ".", { recursive: true });
      writeFileSync(req.out, svg);
      console.log(`wrote ${req.out}`);
    } catch (err) {
      console.error(`figure ${req.name}: ${(err as Error).message}`);
      failures += 1;
    }
  }
  return failures === 0 ? 0 : 1;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
