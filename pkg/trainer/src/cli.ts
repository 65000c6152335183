// Train-and-export entry point. Reads the verifier's signal CSVs, trains
// the autoencoder, and writes three files the verifier can consume
// directly: the model JSON, a probe JSON (inputs + this trainer's own
// outputs for cross-checking), and a metrics JSON with the resolved
// config and final losses.

import { parseArgs } from "node:util";
import { readFileSync, writeFileSync, renameSync } from "node:fs";
import { parseSignalsCsv } from "./csv.js";
import { forward, meanSquaredError, toModelJson } from "./model.js";
import { TrainConfig, trainAutoencoder } from "./train.js";

function writeAtomic(path: string, text: string): void {
  const tmp = path + ".tmp";
  writeFileSync(tmp, text);
  renameSync(tmp, path);
}

export function run(argv: string[]): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      train: { type: "string" },
      test: { type: "string" },
      out: { type: "string" },
      probes: { type: "string" },
      metrics: { type: "string" },
      widths: { type: "string", default: "100,64,16,64,100" },
      epochs: { type: "string", default: "40" },
      batch: { type: "string", default: "32" },
      lr: { type: "string", default: "0.001" },
      seed: { type: "string", default: "0" },
      "probe-count": { type: "string", default: "10" },
      name: { type: "string", default: "trained-autoencoder" },
    },
  });

  if (!values.train || !values.test || !values.out) {
    console.error("required: --train <csv> --test <csv> --out <model.json>");
    return 2;
  }

  const widths = values.widths!.split(",").map((w) => Number.parseInt(w, 10));
  if (widths.some((w) => !Number.isInteger(w) || w <= 0)) {
    console.error(`bad --widths: ${values.widths}`);
    return 2;
  }
  const mirrored = [...widths].reverse();
  if (widths.some((w, i) => w !== mirrored[i])) {
    console.error(`--widths must be symmetric (encoder mirrors decoder), got ${values.widths}`);
    return 2;
  }

  const train = parseSignalsCsv(readFileSync(values.train, "utf-8"));
  const test = parseSignalsCsv(readFileSync(values.test, "utf-8"));
  if (widths[0] !== train.nSamples) {
    console.error(
      `--widths starts at ${widths[0]} but training signals have ${train.nSamples} samples`,
    );
    return 2;
  }

  const config: TrainConfig = {
    widths,
    epochs: Number.parseInt(values.epochs!, 10),
    batchSize: Number.parseInt(values.batch!, 10),
    learningRate: Number.parseFloat(values.lr!),
    seed: Number.parseInt(values.seed!, 10),
    name: values.name!,
  };

  let outcome;
  const started = Date.now();
  try {
    outcome = trainAutoencoder(train.samples, config);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
  const seconds = (Date.now() - started) / 1000;

  const trainMse = meanSquaredError(outcome.net, train.samples);
  const testMse = meanSquaredError(outcome.net, test.samples);
  console.log(
    `trained ${config.widths.join("-")} for ${config.epochs} epochs in ${seconds.toFixed(1)}s: ` +
      `train MSE ${trainMse.toExponential(3)}, test MSE ${testMse.toExponential(3)}`,
  );

  writeAtomic(values.out, toModelJson(outcome.net));

  if (values.probes) {
    const count = Math.min(Number.parseInt(values["probe-count"]!, 10), test.ids.length);
    const probes = {
      format_version: "1",
      model: config.name,
      signal_ids: test.ids.slice(0, count),
      inputs: test.samples.slice(0, count).map((row) => Array.from(row)),
      outputs: test.samples
        .slice(0, count)
        .map((row) => Array.from(forward(outcome.net, row))),
    };
    writeAtomic(values.probes, JSON.stringify(probes, null, 1) + "\n");
  }

  if (values.metrics) {
    const metrics = {
      format_version: "1",
      config: {
        widths: config.widths,
        epochs: config.epochs,
        batch_size: config.batchSize,
        learning_rate: config.learningRate,
        seed: config.seed,
        train: values.train,
        test: values.test,
      },
      train_mse: trainMse,
      test_mse: testMse,
      first_epoch_loss: outcome.epochLosses[0] ?? null,
      last_epoch_loss: outcome.epochLosses[outcome.epochLosses.length - 1] ?? null,
      seconds,
    };
    writeAtomic(values.metrics, JSON.stringify(metrics, null, 1) + "\n");
  }
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(run(process.argv.slice(2)));
}
