/** Client-side precheck of a pasted core-set CSV. The service remains the
 *  authority; this only catches the obvious mistakes before a round trip
 *  and produces field-level messages for the setup form. */

export interface CsvCheck {
  ok: boolean;
  rows: { label: number; text: string }[];
  errors: string[];
  classCounts: { positive: number; negative: number };
}

export function checkCoreCsv(raw: string): CsvCheck {
  const errors: string[] = [];
  const rows: { label: number; text: string }[] = [];
  const lines = raw.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    return {
      ok: false,
      rows,
      errors: ["the CSV is empty"],
      classCounts: { positive: 0, negative: 0 },
    };
  }
  const header = lines[0]!.split(",").map((h) => h.trim().toLowerCase());
  if (header.length !== 2 || header[0] !== "label" || header[1] !== "text") {
    errors.push(`line 1: header must be "label,text", got "${lines[0]}"`);
  }
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i]!;
    const comma = line.indexOf(",");
    const label = comma < 0 ? "" : line.slice(0, comma).trim();
    const text = comma < 0 ? "" : line.slice(comma + 1).trim();
    if (label !== "0" && label !== "1") {
      errors.push(`line ${i + 1}: label must be 0 or 1`);
      continue;
    }
    if (text.length === 0) {
      errors.push(`line ${i + 1}: empty sentence`);
      continue;
    }
    rows.push({ label: Number(label), text });
  }
  if (rows.length === 0 && errors.length === 0) {
    errors.push("no data rows after the header");
  }
  const classCounts = {
    positive: rows.filter((r) => r.label === 1).length,
    negative: rows.filter((r) => r.label === 0).length,
  };
  if (rows.length > 0 && (classCounts.positive === 0 || classCounts.negative === 0)) {
    errors.push("core set needs at least one positive and one negative sentence");
  }
  return { ok: errors.length === 0, rows, errors, classCounts };
}
