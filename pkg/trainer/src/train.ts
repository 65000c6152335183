// Mini-batch Adam on mean-squared reconstruction error. The network is a
// Dense/ReLU stack with a linear output layer; targets are the inputs.
// Everything that draws randomness (weight init, batch shuffling) goes
// through the seeded PRNG, so a fixed config trains to identical weights
// on every run.

import { DenseLayer, Network, forward } from "./model.js";
import { Xoshiro256StarStar } from "./rng.js";

export interface TrainConfig {
  widths: number[];
  epochs: number;
  batchSize: number;
  learningRate: number;
  seed: number;
  name: string;
}

export interface TrainOutcome {
  net: Network;
  epochLosses: number[];
}

export function initNetwork(widths: number[], seed: number, name: string): Network {
  const rng = new Xoshiro256StarStar(seed);
  const layers: Network["layers"] = [];
  for (let i = 0; i + 1 < widths.length; i++) {
    const inDim = widths[i];
    const outDim = widths[i + 1];
    const limit = 1 / Math.sqrt(inDim);
    const weights = new Float64Array(outDim * inDim);
    for (let k = 0; k < weights.length; k++) {
      weights[k] = rng.uniform(-limit, limit);
    }
    layers.push({ kind: "dense", inDim, outDim, weights, bias: new Float64Array(outDim) });
    if (i + 2 < widths.length) {
      layers.push({ kind: "relu", width: outDim });
    }
  }
  return { name, inputDim: widths[0], outputDim: widths[widths.length - 1], layers };
}

/**
 * Backprop for one sample; adds dL/dW and dL/db into the gradient buffers
 * and returns the sample loss, with L = mean_i (out_i - x_i)^2.
 */
export function accumulateSampleGradients(
  net: Network,
  denseLayers: DenseLayer[],
  x: Float64Array,
  weightGrads: Float64Array[],
  biasGrads: Float64Array[],
): number {
  const n = x.length;
  const inputs: Float64Array[] = [x];
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
      for (let i = 0; i < layer.width; i++) out[i] = Math.max(0, current[i]);
      current = out;
    }
    inputs.push(current);
  }

  let loss = 0;
  let delta = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    const diff = current[i] - x[i];
    delta[i] = (2 * diff) / n;
    loss += (diff * diff) / n;
  }

  let denseIndex = denseLayers.length;
  for (let li = net.layers.length - 1; li >= 0; li--) {
    const layer = net.layers[li];
    const layerInput = inputs[li];
    if (layer.kind === "dense") {
      denseIndex -= 1;
      const gW = weightGrads[denseIndex];
      const gB = biasGrads[denseIndex];
      const next = new Float64Array(layer.inDim);
      for (let r = 0; r < layer.outDim; r++) {
        const d = delta[r];
        gB[r] += d;
        const base = r * layer.inDim;
        for (let c = 0; c < layer.inDim; c++) {
          gW[base + c] += d * layerInput[c];
          next[c] += layer.weights[base + c] * d;
        }
      }
      delta = next;
    } else {
      for (let i = 0; i < layer.width; i++) {
        if (layerInput[i] <= 0) delta[i] = 0;
      }
    }
  }
  return loss;
}

interface AdamState {
  m: Float64Array;
  v: Float64Array;
}

const BETA1 = 0.9;
const BETA2 = 0.999;
const EPS = 1e-8;

function adamStep(param: Float64Array, grad: Float64Array, state: AdamState,
                  lr: number, t: number): void {
  const c1 = 1 - Math.pow(BETA1, t);
  const c2 = 1 - Math.pow(BETA2, t);
  for (let i = 0; i < param.length; i++) {
    const g = grad[i];
    state.m[i] = BETA1 * state.m[i] + (1 - BETA1) * g;
    state.v[i] = BETA2 * state.v[i] + (1 - BETA2) * g * g;
    param[i] -= (lr * (state.m[i] / c1)) / (Math.sqrt(state.v[i] / c2) + EPS);
  }
}

export function trainAutoencoder(rows: Float64Array[], config: TrainConfig): TrainOutcome {
  const net = initNetwork(config.widths, config.seed, config.name);
  const dense = net.layers.filter((l): l is DenseLayer => l.kind === "dense");
  const rng = new Xoshiro256StarStar(BigInt(config.seed) ^ 0x5eedn);

  const weightGrads = dense.map((l) => new Float64Array(l.weights.length));
  const biasGrads = dense.map((l) => new Float64Array(l.bias.length));
  const weightState: AdamState[] = dense.map((l) => ({
    m: new Float64Array(l.weights.length),
    v: new Float64Array(l.weights.length),
  }));
  const biasState: AdamState[] = dense.map((l) => ({
    m: new Float64Array(l.bias.length),
    v: new Float64Array(l.bias.length),
  }));

  const order = rows.map((_, i) => i);
  let step = 0;
  const epochLosses: number[] = [];

  for (let epoch = 0; epoch < config.epochs; epoch++) {
    // Deterministic Fisher-Yates shuffle.
    for (let i = order.length - 1; i > 0; i--) {
      const j = rng.below(i + 1);
      const tmp = order[i];
      order[i] = order[j];
      order[j] = tmp;
    }

    let epochLoss = 0;
    for (let start = 0; start < order.length; start += config.batchSize) {
      const batch = order.slice(start, start + config.batchSize);
      for (const g of weightGrads) g.fill(0);
      for (const g of biasGrads) g.fill(0);
      for (const rowIndex of batch) {
        epochLoss += accumulateSampleGradients(
          net, dense, rows[rowIndex], weightGrads, biasGrads,
        );
      }
      const scale = 1 / batch.length;
      step += 1;
      for (let d = 0; d < dense.length; d++) {
        const gW = weightGrads[d];
        for (let i = 0; i < gW.length; i++) gW[i] *= scale;
        const gB = biasGrads[d];
        for (let i = 0; i < gB.length; i++) gB[i] *= scale;
        adamStep(dense[d].weights, gW, weightState[d], config.learningRate, step);
        adamStep(dense[d].bias, gB, biasState[d], config.learningRate, step);
      }
    }

    epochLoss /= rows.length;
    if (!Number.isFinite(epochLoss)) {
      throw new Error(`training diverged at epoch ${epoch}: loss is not finite`);
    }
    epochLosses.push(epochLoss);
  }
  return { net, epochLosses };
}

/**
 * Worst relative disagreement between backprop and central finite
 * differences over a few weights of a freshly initialized net.
 */
export function numericalGradientCheck(rows: Float64Array[], widths: number[]): number {
  const net = initNetwork(widths, 7, "gradcheck");
  const dense = net.layers.filter((l): l is DenseLayer => l.kind === "dense");
  const weightGrads = dense.map((l) => new Float64Array(l.weights.length));
  const biasGrads = dense.map((l) => new Float64Array(l.bias.length));
  for (const row of rows) {
    accumulateSampleGradients(net, dense, row, weightGrads, biasGrads);
  }

  const totalLoss = () => {
    let total = 0;
    for (const row of rows) {
      const out = forward(net, row);
      for (let i = 0; i < row.length; i++) {
        total += (out[i] - row[i]) ** 2 / row.length;
      }
    }
    return total;
  };

  let worst = 0;
  const h = 1e-6;
  for (let d = 0; d < dense.length; d++) {
    const params = dense[d].weights;
    for (let i = 0; i < Math.min(params.length, 8); i++) {
      const saved = params[i];
      params[i] = saved + h;
      const up = totalLoss();
      params[i] = saved - h;
      const down = totalLoss();
      params[i] = saved;
      const numeric = (up - down) / (2 * h);
      const analytic = weightGrads[d][i];
      const denom = Math.max(1e-6, Math.abs(numeric) + Math.abs(analytic));
      worst = Math.max(worst, Math.abs(numeric - analytic) / denom);
    }
  }
  return worst;
}
