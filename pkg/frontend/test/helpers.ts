import { mkdirSync, writeFileSync } from "fs";
import { join } from "path";

/** Write a miniature run directory in the simulator's output format. */
export function makeRunDir(
  root: string,
  mode: string,
  opts: { cells?: number; steps?: number; withWindows?: boolean; withRelError?: boolean } = {},
): string {
  const cells = opts.cells ?? 8;
  const steps = opts.steps ?? 3;
  const dir = join(root, mode);
  mkdirSync(dir, { recursive: true });

  const header = "step,t,cell,x_center,value\n";
  const xc = (c: number) => -1 + (2 * c + 1) / cells;
  const quantity = (f: (s: number, c: number) => number) => {
    let text = header;
    for (let s = 0; s < steps; s++) {
      for (let c = 0; c < cells; c++) {
        text += `${s},${0.5 * (s + 1)},${c},${xc(c)},${f(s, c)}\n`;
      }
    }
    return text;
  };

  const bump = (s: number, c: number) =>
    Math.exp(-((xc(c) / (0.2 + 0.1 * s)) ** 2)) + 1e-6;
  writeFileSync(join(dir, "flux.csv"), quantity(bump));
  writeFileSync(join(dir, "rel_sdev.csv"), quantity((s, c) => 0.01 + 0.3 * Math.abs(xc(c))));
  writeFileSync(join(dir, "fom.csv"), quantity((s, c) => 1e3 * bump(s, c)));
  writeFileSync(join(dir, "particles.csv"), quantity((s, c) => Math.round(500 * bump(s, c))));
  writeFileSync(join(dir, "census_phi.csv"), quantity(bump));
  writeFileSync(join(dir, "census_current.csv"), quantity((s, c) => 0.1 * xc(c)));
  writeFileSync(join(dir, "sm_raw.csv"), quantity((s, c) => 0.05 * Math.sin(8 * xc(c))));
  writeFileSync(join(dir, "sm_filtered.csv"), quantity((s, c) => 0.04 * Math.sin(8 * xc(c))));
  if (mode !== "analog") {
    writeFileSync(join(dir, "aux_flux.csv"), quantity(bump));
    if (opts.withRelError ?? true) {
      writeFileSync(join(dir, "rel_error.csv"), quantity((s, c) => 0.02 + 0.1 * Math.abs(xc(c))));
    }
    if (opts.withWindows ?? true) {
      let w = "step,t,cell,x_center,center_raw,center_modified,floor,ceiling\n";
      for (let s = 0; s < steps; s++) {
        for (let c = 0; c < cells; c++) {
          const ctr = Math.max(bump(s, c), 1e-4);
          w += `${s},${0.5 * (s + 1)},${c},${xc(c)},${ctr},${ctr * 1.01},${ctr / 2.5},${ctr * 2.5}\n`;
        }
      }
      writeFileSync(join(dir, "windows.csv"), w);
    }
  }
  writeFileSync(
    join(dir, "manifest.json"),
    JSON.stringify({
      version: "0.1.0",
      config: {
        run: { mode },
        domain: { cells, x_min: -1, x_max: 1 },
        mc: { seed: 1 },
      },
    }),
  );
  return dir;
}
