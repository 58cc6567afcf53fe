/** Minimal CSV handling for the harness's plain numeric/text tables. */

export interface Table {
  header: string[];
  rows: string[][];
}

export class SchemaMismatch extends Error {
  readonly missing: string[];

  constructor(missing: string[], context: string) {
    super(`schema mismatch in ${context}: missing column(s) ${missing.join(", ")}`);
    this.name = "SchemaMismatch";
    this.missing = missing;
  }
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    return { header: [], rows: [] };
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line) => line.split(","));
  return { header, rows };
}

/** Validate required columns; empty tables always mismatch. */
export function requireColumns(table: Table, columns: string[], context: string): void {
  const missing = columns.filter((c) => !table.header.includes(c));
  if (missing.length > 0 || table.rows.length === 0) {
    throw new SchemaMismatch(missing.length > 0 ? missing : columns, context);
  }
}

export function column(table: Table, name: string): string[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new SchemaMismatch([name], "column lookup");
  }
  return table.rows.map((r) => r[idx]);
}

export function numericColumn(table: Table, name: string): number[] {
  return column(table, name).map((v) => {
    const x = Number(v);
    if (!Number.isFinite(x)) {
      throw new SchemaMismatch([name], `non-numeric value ${JSON.stringify(v)}`);
    }
    return x;
  });
}
