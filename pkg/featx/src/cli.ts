#!/usr/bin/env node
/** featx CLI.
 *
 *   featx run        --in RAW_DIR --out DATA_DIR [--config FILE]
 *   featx <stage>    --in RAW_DIR --out DATA_DIR [--config FILE]
 *
 * Stages: preprocess | summarize | semantics | behavior | prompt | export.
 * Intermediate artifacts live under DATA_DIR/stages/; the export stage
 * writes records.jsonl, vocab.json, and manifest.json at DATA_DIR's root.
 */

import * as fs from "node:fs";

import { STAGES, StageName, makeContext, runAll, runStage } from "./pipeline.js";
import { PipelineConfig } from "./types.js";

function parseArgs(argv: string[]): { command: string; flags: Map<string, string> } {
  const [command, ...rest] = argv;
  if (!command) throw new Error("usage: featx <run|" + STAGES.join("|") + "> --in DIR --out DIR");
  const flags = new Map<string, string>();
  for (let i = 0; i < rest.length; i += 2) {
    const key = rest[i];
    const value = rest[i + 1];
    if (!key?.startsWith("--") || value === undefined) {
      throw new Error(`bad argument near ${key ?? "(end)"}`);
    }
    flags.set(key.slice(2), value);
  }
  return { command, flags };
}

function required(flags: Map<string, string>, name: string): string {
  const value = flags.get(name);
  if (!value) throw new Error(`missing --${name}`);
  return value;
}

export async function main(argv: string[]): Promise<number> {
  try {
    const { command, flags } = parseArgs(argv);
    const rawDir = required(flags, "in");
    const dataDir = required(flags, "out");
    let config: Partial<PipelineConfig> = {};
    const configPath = flags.get("config");
    if (configPath) {
      config = JSON.parse(fs.readFileSync(configPath, "utf8"));
    }
    const ctx = makeContext(rawDir, dataDir, config);
    if (command === "run") {
      await runAll(ctx);
    } else if ((STAGES as readonly string[]).includes(command)) {
      await runStage(ctx, command as StageName);
    } else {
      throw new Error(`unknown command ${command}`);
    }
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : String(err)}`);
    return 2;
  }
}

const invokedDirectly = process.argv[1] &&
  import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => process.exit(code));
}
