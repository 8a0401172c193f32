import { execFile } from "node:child_process";
import { mkdtemp, readFile, rm, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";

/** Options shared by every binding call. */
export interface CliOptions {
  /** Python interpreter used to launch the CLI (default: $GAMAP_PYTHON or "python3"). */
  python?: string;
}

/** Raised when the CLI exits non-zero; carries its exit code and stderr. */
export class GamapCliError extends Error {
  constructor(
    readonly exitCode: number,
    readonly stderr: string,
    args: string[],
  ) {
    super(`gamap ${args[0] ?? ""} exited with code ${exitCode}: ${stderr.trim()}`);
    this.name = "GamapCliError";
  }
}

function interpreter(options?: CliOptions): string {
  return options?.python ?? process.env.GAMAP_PYTHON ?? "python3";
}

/** Run one CLI subcommand and wait for it to finish. */
export function runCli(args: string[], options?: CliOptions): Promise<void> {
  return new Promise((resolve, reject) => {
    execFile(
      interpreter(options),
      ["-m", "gamap.cli", ...args],
      { maxBuffer: 64 * 1024 * 1024 },
      (error, _stdout, stderr) => {
        if (error) {
          const code = typeof error.code === "number" ? error.code : -1;
          reject(new GamapCliError(code, stderr ?? "", args));
        } else {
          resolve();
        }
      },
    );
  });
}

/** Create a scratch directory, run `work`, and always clean up. */
export async function withScratchDir<T>(
  work: (dir: string) => Promise<T>,
): Promise<T> {
  const dir = await mkdtemp(join(tmpdir(), "gamap-"));
  try {
    return await work(dir);
  } finally {
    await rm(dir, { recursive: true, force: true });
  }
}

export async function writeTextFile(path: string, text: string): Promise<void> {
  await writeFile(path, text, "utf8");
}

export async function readTextFile(path: string): Promise<string> {
  return readFile(path, "utf8");
}

export async function readJsonFile<T>(path: string): Promise<T> {
  return JSON.parse(await readFile(path, "utf8")) as T;
}
