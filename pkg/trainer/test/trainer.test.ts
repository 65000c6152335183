import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { parseSignalsCsv } from "../src/csv.js";
import { forward, meanSquaredError, toModelJson, Network } from "../src/model.js";
import { Xoshiro256StarStar } from "../src/rng.js";
import { initNetwork, numericalGradientCheck, trainAutoencoder } from "../src/train.js";
import { run as trainerCli } from "../src/cli.js";

describe("rng", () => {
  it("matches the verifier's frozen xoshiro256** stream for seed 0", () => {
    const g = new Xoshiro256StarStar(0);
    expect(g.nextU64()).toBe(0x99ec5f36cb75f2b4n);
    expect(g.nextU64()).toBe(0xbf6e1f784956452an);
    expect(g.nextU64()).toBe(0x1a5f849d4933e6e0n);
  });

  it("below() is deterministic and in range", () => {
    const g = new Xoshiro256StarStar(7);
    const draws = Array.from({ length: 10 }, () => g.below(100));
    // Same sequence the verifier produces for seed 7.
    expect(draws).toEqual([94, 74, 38, 64, 64, 21, 16, 96, 8, 19]);
  });
});

describe("forward", () => {
  it("reproduces the hand-computed 2-2-2 example", () => {
    const net: Network = {
      name: "tiny",
      inputDim: 2,
      outputDim: 2,
      layers: [
        {
          kind: "dense", inDim: 2, outDim: 2,
          weights: Float64Array.from([1, 2, 3, 4]),
          bias: Float64Array.from([0.5, -1]),
        },
        { kind: "relu", width: 2 },
        {
          kind: "dense", inDim: 2, outDim: 2,
          weights: Float64Array.from([1, -1, 2, 1]),
          bias: Float64Array.from([0, 1]),
        },
      ],
    };
    // (1, -1): W1 x + b1 = (-0.5, -2) -> relu (0, 0) -> b2 = (0, 1).
    expect(Array.from(forward(net, Float64Array.from([1, -1])))).toEqual([0, 1]);
  });
});

describe("training", () => {
  function sinusoids(count: number, n: number, seed: number): Float64Array[] {
    const rng = new Xoshiro256StarStar(seed);
    const rows: Float64Array[] = [];
    for (let s = 0; s < count; s++) {
      const freq = rng.uniform(0.5, 3.0);
      const phase = rng.uniform(0, 2 * Math.PI);
      const amp = rng.uniform(0.2, 0.45);
      const row = new Float64Array(n);
      for (let t = 0; t < n; t++) {
        row[t] = 0.5 + amp * Math.sin((2 * Math.PI * freq * t) / n + phase);
      }
      rows.push(row);
    }
    return rows;
  }

  it("backprop agrees with finite differences", () => {
    const rows = sinusoids(4, 8, 3);
    const worst = numericalGradientCheck(rows, [8, 5, 3, 5, 8]);
    expect(worst).toBeLessThan(1e-5);
  });

  it("is deterministic: identical configs export identical weights", () => {
    const rows = sinusoids(12, 10, 1);
    const config = {
      widths: [10, 6, 4, 6, 10], epochs: 1, batchSize: 4,
      learningRate: 1e-3, seed: 42, name: "det",
    };
    const a = trainAutoencoder(rows, config);
    const b = trainAutoencoder(rows, config);
    expect(toModelJson(a.net)).toBe(toModelJson(b.net));
    expect(a.epochLosses).toEqual(b.epochLosses);
  });

  it("reaches MSE < 1e-4 on constant signals (identity capacity)", () => {
    const rng = new Xoshiro256StarStar(9);
    const rows: Float64Array[] = [];
    for (let i = 0; i < 32; i++) {
      const level = rng.uniform(0.1, 0.9);
      rows.push(new Float64Array(10).fill(level));
    }
    const outcome = trainAutoencoder(rows, {
      widths: [10, 6, 4, 6, 10], epochs: 400, batchSize: 8,
      learningRate: 3e-3, seed: 0, name: "const",
    });
    const holdout: Float64Array[] = [];
    for (let i = 0; i < 8; i++) {
      holdout.push(new Float64Array(10).fill(rng.uniform(0.1, 0.9)));
    }
    expect(meanSquaredError(outcome.net, holdout)).toBeLessThan(1e-4);
  });

  it("decreases the training loss on sinusoid mixtures", () => {
    const rows = sinusoids(64, 20, 5);
    const outcome = trainAutoencoder(rows, {
      widths: [20, 12, 6, 12, 20], epochs: 60, batchSize: 8,
      learningRate: 2e-3, seed: 0, name: "sin",
    });
    const first = outcome.epochLosses[0];
    const last = outcome.epochLosses[outcome.epochLosses.length - 1];
    expect(last).toBeLessThan(first / 5);
    const untrained = meanSquaredError(initNetwork([20, 12, 6, 12, 20], 0, "x"), rows);
    expect(meanSquaredError(outcome.net, rows)).toBeLessThan(untrained);
  });
});

describe("csv", () => {
  it("parses the verifier header format", () => {
    const set = parseSignalsCsv("id,s0,s1\nfoo,0.25,0.5\nbar,1.0,0.0\n");
    expect(set.ids).toEqual(["foo", "bar"]);
    expect(set.nSamples).toBe(2);
    expect(Array.from(set.samples[1])).toEqual([1.0, 0.0]);
  });

  it("rejects ragged rows", () => {
    expect(() => parseSignalsCsv("id,s0,s1\nfoo,0.25\n")).toThrow(/row 2/);
  });
});

describe("verifier interop", () => {
  let workDir: string;

  beforeAll(() => {
    workDir = mkdtempSync(join(tmpdir(), "trainer-interop-"));
    // Desk-scale fixture data from the verifier CLI (external interface).
    execFileSync("python3", [
      "-m", "starverify.cli", "gen-fixtures", "--seed", "0",
      "--out", workDir, "--train-count", "80", "--test-count", "12",
    ]);
  });

  afterAll(() => {
    rmSync(workDir, { recursive: true, force: true });
  });

  it("exports a model the verifier loads; probe outputs match through the CLI", () => {
    const modelPath = join(workDir, "trained.json");
    const probesPath = join(workDir, "probes.json");
    const metricsPath = join(workDir, "metrics.json");
    const code = trainerCli([
      "--train", join(workDir, "signals_train.csv"),
      "--test", join(workDir, "signals_test.csv"),
      "--out", modelPath, "--probes", probesPath, "--metrics", metricsPath,
      "--widths", "100,64,16,64,100", "--epochs", "8", "--batch", "16",
      "--lr", "0.002", "--seed", "0", "--probe-count", "3",
    ]);
    expect(code).toBe(0);

    const probes = JSON.parse(readFileSync(probesPath, "utf-8"));
    expect(probes.signal_ids.length).toBe(3);
    for (let p = 0; p < probes.signal_ids.length; p++) {
      const stdout = execFileSync("python3", [
        "-m", "starverify.cli", "bounds",
        "--model", modelPath,
        "--signals", join(workDir, "signals_test.csv"),
        "--signal-id", probes.signal_ids[p],
        "--fault-loc", "0", "--fault-lo", "0", "--fault-hi", "0",
      ]).toString();
      const doc = JSON.parse(stdout);
      // Zero-width fault: the verifier's bounds collapse to its forward pass.
      for (let i = 0; i < 100; i++) {
        expect(Math.abs(doc.lower[i] - probes.outputs[p][i])).toBeLessThan(1e-5);
        expect(Math.abs(doc.upper[i] - probes.outputs[p][i])).toBeLessThan(1e-5);
      }
    }

    const metrics = JSON.parse(readFileSync(metricsPath, "utf-8"));
    expect(metrics.train_mse).toBeGreaterThan(0);
    expect(metrics.config.epochs).toBe(8);
  });

  it("rejects asymmetric widths", () => {
    const code = trainerCli([
      "--train", join(workDir, "signals_train.csv"),
      "--test", join(workDir, "signals_test.csv"),
      "--out", join(workDir, "bad.json"),
      "--widths", "100,64,32,100",
    ]);
    expect(code).toBe(2);
  });
});
