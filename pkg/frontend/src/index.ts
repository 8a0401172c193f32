/**
 * Node bindings for the gamap toolkit.
 *
 * Every function marshals plain arrays into the CLI's file formats, runs
 * one subcommand, and unmarshals the result. No algorithmic code lives
 * here, so binding outputs are numerically identical to what the CLI
 * writes for the same inputs. Calls are async and run in a child process,
 * so the event loop stays free during long computations.
 */

import { join } from "node:path";

import {
  defaultNames,
  parseAttributionCsv,
  parseMatrixCsv,
  toAttributionCsv,
  toMatrixCsv,
} from "./csv.js";
import {
  CliOptions,
  readJsonFile,
  readTextFile,
  runCli,
  withScratchDir,
  writeTextFile,
} from "./runner.js";

export { CliOptions, GamapCliError } from "./runner.js";

export type Metric = "kendall" | "spearman";

/** Normalized weights plus 1..n ranks, row-aligned with the input. */
export interface NormalizedAttributions {
  weights: number[][];
  ranks: number[][];
}

/** One cluster record exactly as the core serializes it. */
export interface GamCluster {
  size: number;
  explanatory_power: number;
  medoid_sample_index: number;
  medoid_weights: Record<string, number>;
  medoid_raw_weights: Record<string, number>;
  member_sample_indices: number[];
}

/** Global attribution map, mirroring the core's JSON byte for byte. */
export interface GamResult {
  config: {
    metric: Metric;
    k: number;
    k_range: [number, number] | null;
    seed: number;
    restarts: number;
    max_iter: number;
  };
  silhouette_mean: number;
  clusters: GamCluster[];
}

export interface SilhouetteResult {
  per_point: number[];
  mean: number;
}

export interface FitGamOptions extends CliOptions {
  metric?: Metric;
  /** Fixed cluster count; leave unset to use autoK. */
  k?: number;
  /** Inclusive silhouette-selection range, used when k is unset. */
  autoK?: [number, number];
  seed?: number;
  restarts?: number;
  maxIter?: number;
  /** Column names for the weight records (default f0, f1, ...). */
  featureNames?: string[];
}

/** Row-wise normalization: |w| / sum|w| plus descending-weight ranks. */
export async function normalize(
  matrix: number[][],
  options?: CliOptions & { featureNames?: string[] },
): Promise<NormalizedAttributions> {
  if (matrix.length === 0) {
    return { weights: [], ranks: [] };
  }
  const names = options?.featureNames ?? defaultNames(matrix[0]!.length);
  return withScratchDir(async (dir) => {
    const input = join(dir, "attrs.csv");
    const weightsOut = join(dir, "weights.csv");
    const ranksOut = join(dir, "ranks.csv");
    await writeTextFile(input, toAttributionCsv(names, matrix));
    await runCli(
      [
        "normalize",
        "--attributions", input,
        "--out-weights", weightsOut,
        "--out-ranks", ranksOut,
      ],
      options,
    );
    return {
      weights: parseAttributionCsv(await readTextFile(weightsOut)).matrix,
      ranks: parseAttributionCsv(await readTextFile(ranksOut)).matrix,
    };
  });
}

/** Pairwise rank-distance matrix over raw attribution rows. */
export async function pairwiseDistances(
  matrix: number[][],
  metric: Metric = "kendall",
  options?: CliOptions,
): Promise<number[][]> {
  return withScratchDir(async (dir) => {
    const input = join(dir, "attrs.csv");
    const out = join(dir, "dist.csv");
    const width = matrix[0]?.length ?? 0;
    await writeTextFile(input, toAttributionCsv(defaultNames(width), matrix));
    await runCli(
      ["distances", "--attributions", input, "--metric", metric, "--out", out],
      options,
    );
    return parseMatrixCsv(await readTextFile(out));
  });
}

/** Weighted Kendall tau distance between two raw attribution vectors. */
export async function kendallDistance(
  a: number[],
  b: number[],
  options?: CliOptions,
): Promise<number> {
  const d = await pairwiseDistances([a, b], "kendall", options);
  return d[0]![1]!;
}

/** Weighted squared Spearman rho distance between two raw attribution vectors. */
export async function spearmanDistance(
  a: number[],
  b: number[],
  options?: CliOptions,
): Promise<number> {
  const d = await pairwiseDistances([a, b], "spearman", options);
  return d[0]![1]!;
}

/** Silhouette report for a distance matrix plus cluster assignment. */
export async function silhouette(
  distances: number[][],
  assignment: number[],
  options?: CliOptions,
): Promise<SilhouetteResult> {
  return withScratchDir(async (dir) => {
    const dPath = join(dir, "dist.csv");
    const aPath = join(dir, "assignment.json");
    const out = join(dir, "silhouette.json");
    await writeTextFile(dPath, toMatrixCsv(distances));
    await writeTextFile(aPath, JSON.stringify(assignment));
    await runCli(
      ["silhouette", "--distances", dPath, "--assignment", aPath, "--out", out],
      options,
    );
    return readJsonFile<SilhouetteResult>(out);
  });
}

/** Full global attribution map over raw attribution rows. */
export async function fitGam(
  matrix: number[][],
  options?: FitGamOptions,
): Promise<GamResult> {
  const width = matrix[0]?.length ?? 0;
  const names = options?.featureNames ?? defaultNames(width);
  return withScratchDir(async (dir) => {
    const input = join(dir, "attrs.csv");
    const out = join(dir, "map.json");
    await writeTextFile(input, toAttributionCsv(names, matrix));
    const args = [
      "gam",
      "--attributions", input,
      "--metric", options?.metric ?? "kendall",
      "--seed", String(options?.seed ?? 0),
      "--out", out,
    ];
    if (options?.k !== undefined) {
      args.push("--k", String(options.k));
    } else {
      const [lo, hi] = options?.autoK ?? [2, 8];
      args.push("--auto-k", String(lo), String(hi));
    }
    if (options?.restarts !== undefined) {
      args.push("--restarts", String(options.restarts));
    }
    if (options?.maxIter !== undefined) {
      args.push("--max-iter", String(options.maxIter));
    }
    await runCli(args, options);
    return readJsonFile<GamResult>(out);
  });
}
