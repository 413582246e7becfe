import { existsSync, mkdtempSync, readFileSync, rmSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { afterAll, describe, expect, it } from "vitest";

import { main } from "../src/cli.js";
import { makeRunDir } from "./helpers.js";

const root = mkdtempSync(join(tmpdir(), "wwmc-cli-"));
const analog = makeRunDir(root, "analog");
const wwcn = makeRunDir(root, "ww-losm-cn");
afterAll(() => rmSync(root, { recursive: true, force: true }));

describe("cli", () => {
  it("renders a single figure from flags", () => {
    const out = join(root, "figs", "flux.svg");
    const code = main(["--quantity", "flux", "--runs", `${analog},${wwcn}`, "--steps", "1", "--out", out]);
    expect(code).toBe(0);
    expect(existsSync(out)).toBe(true);
    expect(readFileSync(out, "utf8")).toContain("<svg");
  });

  it("renders a full config of requests", () => {
    const cfg = join(root, "figures.cfg");
    writeFileSync(
      cfg,
      `[flux]\nquantity = flux\nruns = ${analog}, ${wwcn}\nsteps = 2\nout = ${join(root, "f1.svg")}\n` +
        `[particles]\nquantity = particles\nruns = ${analog}, ${wwcn}\nsteps = 2\nout = ${join(root, "f2.svg")}\n`,
    );
    expect(main(["--config", cfg])).toBe(0);
    expect(existsSync(join(root, "f1.svg"))).toBe(true);
    expect(existsSync(join(root, "f2.svg"))).toBe(true);
  });

  it("returns nonzero when a figure cannot be built", () => {
    const code = main([
      "--quantity", "aux_flux", "--runs", analog, "--steps", "0",
      "--out", join(root, "nope.svg"),
    ]);
    expect(code).toBe(1);
    expect(existsSync(join(root, "nope.svg"))).toBe(false);
  });

  it("rejects unknown quantities with usage help", () => {
    expect(main(["--quantity", "bogus", "--runs", analog, "--steps", "0", "--out", "x.svg"])).toBe(2);
  });
});
