// Dense/ReLU network representation, forward evaluation, and export in
// the verifier's model JSON format (format_version "1"). JSON.stringify
// writes shortest round-trip doubles, so exported weights reload
// bit-exactly on the verifier side.

export interface DenseLayer {
  kind: "dense";
  inDim: number;
  outDim: number;
  weights: Float64Array; // row-major (outDim x inDim)
  bias: Float64Array;
}

export interface ReluLayer {
  kind: "relu";
  width: number;
}

export type Layer = DenseLayer | ReluLayer;

export interface Network {
  name: string;
  inputDim: number;
  outputDim: number;
  layers: Layer[];
}

export function forward(net: Network, x: Float64Array): Float64Array {
  let current = x;
  for (const layer of net.layers) {
    if (layer.kind === "dense") {
      const out = new Float64Array(layer.outDim);
      for (let r = 0; r < layer.outDim; r++) {
        let acc = layer.bias[r];
        const base = r * layer.inDim;
        for (let c = 0; c < layer.inDim; c++) {
          acc += layer.weights[base + c] * current[c];
        }
        out[r] = acc;
      }
      current = out;
    } else {
      const out = new Float64Array(layer.width);
      for (let i = 0; i < layer.width; i++) {
        out[i] = Math.max(0, current[i]);
      }
      current = out;
    }
  }
  return current;
}

export function meanSquaredError(net: Network, rows: Float64Array[]): number {
  let total = 0;
  for (const row of rows) {
    const out = forward(net, row);
    for (let i = 0; i < row.length; i++) {
      const d = out[i] - row[i];
      total += d * d;
    }
  }
  return total / (rows.length * rows[0].length);
}

export function toModelDocument(net: Network): object {
  const layers = net.layers.map((layer) => {
    if (layer.kind === "dense") {
      const weights: number[][] = [];
      for (let r = 0; r < layer.outDim; r++) {
        const row: number[] = [];
        for (let c = 0; c < layer.inDim; c++) {
          row.push(layer.weights[r * layer.inDim + c]);
        }
        weights.push(row);
      }
      return { type: "dense", weights, bias: Array.from(layer.bias) };
    }
    return { type: "relu" };
  });
  return {
    format_version: "1",
    name: net.name,
    input_dim: net.inputDim,
    output_dim: net.outputDim,
    layers,
  };
}

export function toModelJson(net: Network): string {
  return JSON.stringify(toModelDocument(net), null, 1) + "\n";
}
