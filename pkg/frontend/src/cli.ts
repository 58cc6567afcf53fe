/** `pfilin-figures render --spec figures.cfg`: batch-render the configured
 * figures; nothing is written for a figure whose input fails validation. */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { dirname, resolve } from "node:path";

import { ConfigError, parseFigureSpecs } from "./config.js";
import { SchemaMismatch, parseCsv } from "./csv.js";
import { RENDERERS } from "./figures.js";

export function renderSpecFile(specPath: string): string[] {
  const specs = parseFigureSpecs(readFileSync(specPath, "utf-8"));
  const baseDir = dirname(resolve(specPath));
  const written: string[] = [];
  for (const spec of specs) {
    const inputPath = resolve(baseDir, spec.input);
    const table = parseCsv(readFileSync(inputPath, "utf-8"));
    const svg = RENDERERS[spec.kind](table, { title: spec.title });
    const outputPath = resolve(baseDir, spec.output);
    mkdirSync(dirname(outputPath), { recursive: true });
    writeFileSync(outputPath, svg, "utf-8");
    written.push(outputPath);
  }
  return written;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  if (command !== "render") {
    process.stderr.write("usage: pfilin-figures render --spec <figures.cfg>\n");
    return 2;
  }
  const specIdx = rest.indexOf("--spec");
  if (specIdx < 0 || specIdx + 1 >= rest.length) {
    process.stderr.write("render: --spec <path> is required\n");
    return 2;
  }
  try {
    const written = renderSpecFile(rest[specIdx + 1]);
    for (const path of written) {
      process.stdout.write(`wrote ${path}\n`);
    }
    return 0;
  } catch (err) {
    if (err instanceof SchemaMismatch || err instanceof ConfigError) {
      process.stderr.write(`${err.name}: ${err.message}\n`);
      return 2;
    }
    if (err instanceof Error && "code" in err && err.code === "ENOENT") {
      process.stderr.write(`io-error: ${err.message}\n`);
      return 2;
    }
    throw err;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
