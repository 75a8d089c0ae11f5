/** Stage orchestration with content-hash resumability.
 *
 * Each stage reads its input artifact(s), writes one artifact under
 * DATA_DIR/stages/, and records a hash of (config, input bytes) next to
 * it. Rerunning a stage whose recorded hash still matches is a no-op.
 * The export stage assembles the interchange files at DATA_DIR's root.
 */

import { createHash } from "node:crypto";
import * as fs from "node:fs";
import * as path from "node:path";

import { computeBehavior } from "./behavior.js";
import { embedText } from "./embed.js";
import { exportDataset } from "./exportData.js";
import { preprocess } from "./preprocess.js";
import { runPromptBackend } from "./prompt.js";
import { EntityLinker, GazetteerLinker, extractSemantics } from "./semantics.js";
import { summarizeAll } from "./summarize.js";
import { lexiconHash } from "./text.js";
import {
  BehaviorRecord,
  ExportRecord,
  PipelineConfig,
  PreprocessedUser,
  RawUserArchive,
  mergeConfig,
} from "./types.js";

export const STAGES = ["preprocess", "summarize", "semantics", "behavior",
                       "prompt", "export"] as const;
export type StageName = (typeof STAGES)[number];

export interface StageContext {
  rawDir: string;
  dataDir: string;
  config: PipelineConfig;
  log: (msg: string) => void;
  linker: EntityLinker;
}

export function makeContext(rawDir: string, dataDir: string,
                            config: Partial<PipelineConfig> = {},
                            log: (msg: string) => void = console.error,
                            linker: EntityLinker = new GazetteerLinker()):
    StageContext {
  return { rawDir, dataDir, config: mergeConfig(config), log, linker };
}

function stagesDir(ctx: StageContext): string {
  return path.join(ctx.dataDir, "stages");
}

function artifactPath(ctx: StageContext, name: string): string {
  return path.join(stagesDir(ctx), name);
}

function hashOf(parts: (string | Buffer)[]): string {
  const h = createHash("sha256");
  for (const part of parts) h.update(part);
  return h.digest("hex");
}

function stageInputs(ctx: StageContext, stage: StageName): (string | Buffer)[] {
  const confKey = JSON.stringify({ config: ctx.config, lexicon: lexiconHash(), stage });
  const parts: (string | Buffer)[] = [confKey];
  const dependsOn: Record<StageName, string[]> = {
    preprocess: [path.join(ctx.rawDir, "users.jsonl")],
    summarize: [artifactPath(ctx, "preprocess.jsonl")],
    semantics: [artifactPath(ctx, "summarize.jsonl")],
    behavior: [artifactPath(ctx, "preprocess.jsonl")],
    prompt: [artifactPath(ctx, "preprocess.jsonl")],
    export: [
      artifactPath(ctx, "preprocess.jsonl"),
      artifactPath(ctx, "summarize.jsonl"),
      artifactPath(ctx, "semantics.json"),
      artifactPath(ctx, "behavior.jsonl"),
      artifactPath(ctx, "prompt.jsonl"),
    ],
  };
  for (const dep of dependsOn[stage]) parts.push(fs.readFileSync(dep));
  return parts;
}

/** True when the stage output exists and its recorded input hash matches. */
export function stageUpToDate(ctx: StageContext, stage: StageName,
                              outputs: string[]): boolean {
  const hashPath = artifactPath(ctx, `${stage}.hash`);
  if (!fs.existsSync(hashPath)) return false;
  if (!outputs.every((p) => fs.existsSync(p))) return false;
  try {
    return fs.readFileSync(hashPath, "utf8").trim() === hashOf(stageInputs(ctx, stage));
  } catch {
    return false;
  }
}

function recordHash(ctx: StageContext, stage: StageName): void {
  fs.writeFileSync(artifactPath(ctx, `${stage}.hash`),
                   hashOf(stageInputs(ctx, stage)) + "\n");
}

function readJsonl<T>(file: string): T[] {
  return fs.readFileSync(file, "utf8")
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as T);
}

function writeJsonl(file: string, rows: unknown[]): void {
  fs.writeFileSync(file, rows.map((r) => JSON.stringify(r)).join("\n") + "\n");
}

export function readArchives(rawDir: string): RawUserArchive[] {
  const file = path.join(rawDir, "users.jsonl");
  if (!fs.existsSync(file)) throw new Error(`no raw archive at ${file}`);
  return readJsonl<RawUserArchive>(file);
}

export async function runStage(ctx: StageContext, stage: StageName): Promise<boolean> {
  fs.mkdirSync(stagesDir(ctx), { recursive: true });
  const out = (name: string) => artifactPath(ctx, name);

  const outputs: Record<StageName, string[]> = {
    preprocess: [out("preprocess.jsonl"), out("preprocess.dropped.json")],
    summarize: [out("summarize.jsonl")],
    semantics: [out("semantics.json")],
    behavior: [out("behavior.jsonl")],
    prompt: [out("prompt.jsonl")],
    export: [
      path.join(ctx.dataDir, "records.jsonl"),
      path.join(ctx.dataDir, "vocab.json"),
      path.join(ctx.dataDir, "manifest.json"),
    ],
  };
  if (stageUpToDate(ctx, stage, outputs[stage])) {
    ctx.log(`stage ${stage}: up to date, skipped`);
    return false;
  }

  if (stage === "preprocess") {
    const { users, droppedUsers } = preprocess(readArchives(ctx.rawDir), ctx.log);
    writeJsonl(out("preprocess.jsonl"), users);
    fs.writeFileSync(out("preprocess.dropped.json"),
                     JSON.stringify(droppedUsers) + "\n");
  } else if (stage === "summarize") {
    const users = readJsonl<PreprocessedUser>(out("preprocess.jsonl"));
    const summaries = summarizeAll(users, ctx.config);
    writeJsonl(out("summarize.jsonl"),
               users.map((u) => ({ user_id: u.user_id, summary: summaries.get(u.user_id) })));
  } else if (stage === "semantics") {
    const rows = readJsonl<{ user_id: string; summary: string }>(out("summarize.jsonl"));
    const summaries = new Map(rows.map((r) => [r.user_id, r.summary]));
    const result = await extractSemantics(summaries, ctx.config, ctx.linker, ctx.log);
    fs.writeFileSync(out("semantics.json"), JSON.stringify({
      topics: Object.fromEntries(result.topicVocab),
      entities: Object.fromEntries(result.entityVocab),
      user_topics: Object.fromEntries(result.userTopics),
      user_entities: Object.fromEntries(result.userEntities),
    }, null, 1) + "\n");
  } else if (stage === "behavior") {
    const users = readJsonl<PreprocessedUser>(out("preprocess.jsonl"));
    writeJsonl(out("behavior.jsonl"), users.map((u) => ({
      user_id: u.user_id,
      behavior: computeBehavior(u, ctx.log),
    })));
  } else if (stage === "prompt") {
    const users = readJsonl<PreprocessedUser>(out("preprocess.jsonl"));
    writeJsonl(out("prompt.jsonl"), users.map((u) => ({
      user_id: u.user_id,
      sds_answers: runPromptBackend(
        u.tweets.map((t) => t.raw).join(" "), ctx.config, ctx.log
      ),
    })));
  } else if (stage === "export") {
    const users = readJsonl<PreprocessedUser>(out("preprocess.jsonl"));
    const summaries = new Map(
      readJsonl<{ user_id: string; summary: string }>(out("summarize.jsonl"))
        .map((r) => [r.user_id, r.summary])
    );
    const semantics = JSON.parse(fs.readFileSync(out("semantics.json"), "utf8"));
    const behaviors = new Map(
      readJsonl<{ user_id: string; behavior: BehaviorRecord }>(out("behavior.jsonl"))
        .map((r) => [r.user_id, r.behavior])
    );
    const answers = new Map(
      readJsonl<{ user_id: string; sds_answers: number[] }>(out("prompt.jsonl"))
        .map((r) => [r.user_id, r.sds_answers])
    );
    const records: ExportRecord[] = users.map((u) => ({
      user_id: u.user_id,
      label: u.label,
      post_embedding: embedText(summaries.get(u.user_id) ?? "",
                                ctx.config.embeddingWidth),
      sds_answers: answers.get(u.user_id)!,
      topic_ids: semantics.user_topics[u.user_id] ?? [],
      entity_ids: semantics.user_entities[u.user_id] ?? [],
      behavior: behaviors.get(u.user_id)!,
    }));
    exportDataset({
      records,
      topicVocab: new Map(Object.entries(semantics.topics)),
      entityVocab: new Map(Object.entries(semantics.entities)),
      config: ctx.config,
    }, ctx.dataDir);
  }
  recordHash(ctx, stage);
  ctx.log(`stage ${stage}: done`);
  return true;
}

export async function runAll(ctx: StageContext): Promise<void> {
  for (const stage of STAGES) await runStage(ctx, stage);
}
