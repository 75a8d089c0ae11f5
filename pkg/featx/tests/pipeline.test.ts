import { spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterAll, describe, expect, it } from "vitest";

import { STAGES, makeContext, runAll, runStage } from "../src/pipeline.js";
import { SCALE_ITEMS } from "../src/prompt.js";

import { tenUserCorpus } from "./fixtures.js";

const tmpRoots: string[] = [];

function freshDir(name: string): string {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), `featx-${name}-`));
  tmpRoots.push(dir);
  return dir;
}

afterAll(() => {
  for (const dir of tmpRoots) fs.rmSync(dir, { recursive: true, force: true });
});

function writeCorpus(rawDir: string): void {
  fs.mkdirSync(rawDir, { recursive: true });
  const lines = tenUserCorpus().map((a) => JSON.stringify(a));
  fs.writeFileSync(path.join(rawDir, "users.jsonl"), lines.join("\n") + "\n");
}

async function runPipeline(tag: string): Promise<{ rawDir: string; dataDir: string }> {
  const root = freshDir(tag);
  const rawDir = path.join(root, "raw");
  const dataDir = path.join(root, "data");
  writeCorpus(rawDir);
  const ctx = makeContext(rawDir, dataDir, { seed: 7 }, () => {});
  await runAll(ctx);
  return { rawDir, dataDir };
}

function readRecords(dataDir: string): any[] {
  return fs.readFileSync(path.join(dataDir, "records.jsonl"), "utf8")
    .split("\n").filter((l) => l.trim()).map((l) => JSON.parse(l));
}

describe("full pipeline", () => {
  it("exports files the primary component validates with zero errors", async () => {
    const { dataDir } = await runPipeline("roundtrip");
    for (const name of ["records.jsonl", "vocab.json", "manifest.json"]) {
      expect(fs.existsSync(path.join(dataDir, name))).toBe(true);
    }
    const proc = spawnSync("python3", ["-m", "hsnet.cli", "validate",
                                       "--data", dataDir],
                           { encoding: "utf8" });
    expect(proc.stderr).toBe("");
    expect(proc.status).toBe(0);
    expect(proc.stdout).toContain("ok: 10 records");
  }, 60000);

  it("behavior vectors have dims 24/3/3/2/2/2", async () => {
    const { dataDir } = await runPipeline("dims");
    for (const record of readRecords(dataDir)) {
      expect(record.behavior.time_distribution).toHaveLength(24);
      expect(record.behavior.emoticon_ratio).toHaveLength(3);
      expect(record.behavior.sentiment_word_ratio).toHaveLength(3);
      expect(record.behavior.original_retweet_counts).toHaveLength(2);
      expect(record.behavior.follow_counts).toHaveLength(2);
      expect(record.behavior.first_person_ratio).toHaveLength(2);
    }
  }, 60000);

  it("exported answers yield symptom vectors normalizing to 1 within 1e-9", async () => {
    const { dataDir } = await runPipeline("symptom");
    for (const record of readRecords(dataDir)) {
      const f = [0, 0, 0, 0];
      record.sds_answers.forEach((degree: number, j: number) => {
        const item = SCALE_ITEMS[j]!;
        const score = item.reversed ? 5 - degree : degree;
        f[degree - 1]! += score;
      });
      const total = f.reduce((a, b) => a + b, 0);
      expect(total).toBeGreaterThan(0);
      const normalized = f.map((v) => v / total);
      expect(Math.abs(normalized.reduce((a, b) => a + b, 0) - 1)).toBeLessThan(1e-9);
    }
  }, 60000);

  it("manifest counts match the records", async () => {
    const { dataDir } = await runPipeline("manifest");
    const manifest = JSON.parse(
      fs.readFileSync(path.join(dataDir, "manifest.json"), "utf8"));
    const records = readRecords(dataDir);
    expect(manifest.d_post).toBe(768);
    expect(manifest.class_counts["1"]).toBe(records.filter((r) => r.label === 1).length);
    expect(manifest.class_counts["0"]).toBe(records.filter((r) => r.label === 0).length);
    const vocab = JSON.parse(fs.readFileSync(path.join(dataDir, "vocab.json"), "utf8"));
    expect(Object.keys(vocab.topics)).toHaveLength(manifest.n_topics);
    expect(Object.keys(vocab.entities)).toHaveLength(manifest.n_entities);
  }, 60000);

  it("reruns of completed stages are no-ops (content hash check)", async () => {
    const { rawDir, dataDir } = await runPipeline("resume");
    const recordBytes = fs.readFileSync(path.join(dataDir, "records.jsonl"));
    const logs: string[] = [];
    const ctx = makeContext(rawDir, dataDir, { seed: 7 }, (m) => logs.push(m));
    for (const stage of STAGES) {
      const ran = await runStage(ctx, stage);
      expect(ran).toBe(false);
    }
    expect(logs.filter((m) => m.includes("up to date"))).toHaveLength(STAGES.length);
    expect(fs.readFileSync(path.join(dataDir, "records.jsonl"))).toEqual(recordBytes);
  }, 60000);

  it("a config change invalidates downstream stages", async () => {
    const { rawDir, dataDir } = await runPipeline("invalidate");
    const ctx = makeContext(rawDir, dataDir, { seed: 8 }, () => {});
    const ran = await runStage(ctx, "summarize");
    expect(ran).toBe(true);
  }, 60000);

  it("two fresh runs produce byte-identical outputs", async () => {
    const a = await runPipeline("det-a");
    const b = await runPipeline("det-b");
    for (const name of ["records.jsonl", "vocab.json", "manifest.json"]) {
      expect(fs.readFileSync(path.join(a.dataDir, name)))
        .toEqual(fs.readFileSync(path.join(b.dataDir, name)));
    }
  }, 120000);

  it("depressed-profile users answer the crying item higher", async () => {
    const { dataDir } = await runPipeline("signal");
    const records = readRecords(dataDir);
    const mean = (rs: any[]) =>
      rs.reduce((acc, r) => acc + r.sds_answers[2], 0) / rs.length;
    const depressed = records.filter((r) => r.label === 1);
    const healthy = records.filter((r) => r.label === 0);
    expect(mean(depressed)).toBeGreaterThan(mean(healthy));
  }, 60000);
});
