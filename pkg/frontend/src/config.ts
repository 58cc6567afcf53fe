/** Flat `figure.N.key = value` spec files describing a batch of renders. */

import { FigureKind, RENDERERS } from "./figures.js";

export interface FigureSpec {
  kind: FigureKind;
  input: string;
  output: string;
  title?: string;
}

export class ConfigError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ConfigError";
  }
}

export function parseFigureSpecs(text: string): FigureSpec[] {
  const buckets = new Map<string, Record<string, string>>();
  text.split(/\r?\n/).forEach((raw, lineNo) => {
    const line = raw.split("#", 1)[0].trim();
    if (!line) return;
    const eq = line.indexOf("=");
    if (eq < 0) {
      throw new ConfigError(`line ${lineNo + 1}: expected 'key = value'`);
    }
    const key = line.slice(0, eq).trim();
    const value = line.slice(eq + 1).trim();
    const match = /^figure\.([A-Za-z0-9_-]+)\.(kind|input|output|title)$/.exec(key);
    if (!match) {
      throw new ConfigError(`line ${lineNo + 1}: unknown key ${JSON.stringify(key)}`);
    }
    const bucket = buckets.get(match[1]) ?? {};
    bucket[match[2]] = value;
    buckets.set(match[1], bucket);
  });
  if (buckets.size === 0) {
    throw new ConfigError("no figure entries found");
  }
  const specs: FigureSpec[] = [];
  for (const [name, fields] of buckets) {
    for (const required of ["kind", "input", "output"]) {
      if (!(required in fields)) {
        throw new ConfigError(`figure.${name} is missing '${required}'`);
      }
    }
    if (!(fields.kind in RENDERERS)) {
      throw new ConfigError(
        `figure.${name}: unknown kind ${JSON.stringify(fields.kind)} ` +
        `(expected one of ${Object.keys(RENDERERS).join(", ")})`);
    }
    specs.push({
      kind: fields.kind as FigureKind,
      input: fields.input,
      output: fields.output,
      title: fields.title,
    });
  }
  return specs;
}
