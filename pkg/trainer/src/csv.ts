// Signal CSV reader for the verifier's format: header `id,s0,s1,...`,
// one fixed-length signal per row.

export interface SignalSet {
  ids: string[];
  samples: Float64Array[];
  nSamples: number;
}

export function parseSignalsCsv(text: string): SignalSet {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length < 2) {
    throw new Error("signal CSV needs a header and at least one row");
  }
  const header = lines[0].split(",");
  if (header[0] !== "id") {
    throw new Error("first header column must be 'id'");
  }
  const n = header.length - 1;
  const ids: string[] = [];
  const samples: Float64Array[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== n + 1) {
      throw new Error(`row ${i + 1} has ${cells.length - 1} values, expected ${n}`);
    }
    ids.push(cells[0]);
    const row = new Float64Array(n);
    for (let j = 0; j < n; j++) {
      const value = Number(cells[j + 1]);
      if (!Number.isFinite(value)) {
        throw new Error(`row ${i + 1}: non-finite sample '${cells[j + 1]}'`);
      }
      row[j] = value;
    }
    samples.push(row);
  }
  return { ids, samples, nSamples: n };
}
